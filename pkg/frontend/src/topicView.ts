/**
 * Topic creation view: a text field and a submit action.
 *
 * Validation happens client-side first: an empty draft shows an inline error
 * and never reaches the server. A network failure keeps the draft and shows a
 * retry banner. Enter submits (Shift+Enter inserts a newline).
 */

import { AnnotationApi, ApiError } from './api.js';
import { Session } from './session.js';

export class TopicView {
  private textarea!: HTMLTextAreaElement;
  private feedback!: HTMLElement;
  private submitButton!: HTMLButtonElement;
  private inFlight = false;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: AnnotationApi,
    private readonly session: Session,
  ) {}

  render(): void {
    this.root.innerHTML = `
      <section class="topic-view">
        <h2>New topic</h2>
        <p class="hint">Write an information need as a short query.</p>
        <textarea class="topic-text" dir="auto" rows="3"
                  placeholder="مثال: ما هي عقوبة التهرب الضريبي؟"></textarea>
        <div class="actions">
          <button class="submit-topic" type="button">Submit topic</button>
        </div>
        <div class="feedback" role="status"></div>
      </section>
    `;
    this.textarea = this.root.querySelector('.topic-text') as HTMLTextAreaElement;
    this.feedback = this.root.querySelector('.feedback') as HTMLElement;
    this.submitButton = this.root.querySelector('.submit-topic') as HTMLButtonElement;

    this.submitButton.addEventListener('click', () => void this.submit());
    this.textarea.addEventListener('keydown', (event: KeyboardEvent) => {
      if (event.key === 'Enter' && !event.shiftKey) {
        event.preventDefault();
        void this.submit();
      }
    });
  }

  /** Submit the current draft; resolves when the UI has settled. */
  async submit(): Promise<void> {
    if (this.inFlight) return;
    const text = this.textarea.value;
    if (!text.trim()) {
      this.showFeedback('error', 'Topic text must not be empty.');
      return;
    }
    this.inFlight = true;
    this.submitButton.disabled = true;
    try {
      const created = await this.api.createTopic(text, this.session.assessor);
      this.textarea.value = '';
      this.showFeedback('ok', `Saved as ${created.topic_id}.`);
    } catch (error) {
      if (error instanceof ApiError) {
        // server-side validation: render inline, draft stays
        this.showFeedback('error', error.message);
      } else {
        this.showFeedback('retry', 'Network problem; your draft is kept. Try again.');
      }
    } finally {
      this.inFlight = false;
      this.submitButton.disabled = false;
    }
  }

  private showFeedback(kind: 'ok' | 'error' | 'retry', message: string): void {
    this.feedback.textContent = message;
    this.feedback.className = `feedback feedback-${kind}`;
  }
}
