/**
 * Relevance validation view: shows the query and one candidate passage, takes
 * a binary judgment, and automatically fetches the next task.
 *
 * Keyboard shortcuts mirror the buttons exactly (1 = relevant, 0 = not
 * relevant): both paths go through the same submit method, so they produce
 * identical requests. Only one mutation is in flight at a time; on a lease
 * conflict the view refetches with a notice, the server staying authoritative.
 */

import { AnnotationApi, ApiError, Label, Task } from './api.js';
import { Session } from './session.js';

export class JudgmentView {
  private current: Task | null = null;
  private inFlight = false;
  private keyHandler = (event: KeyboardEvent) => this.onKey(event);

  constructor(
    private readonly root: HTMLElement,
    private readonly api: AnnotationApi,
    private readonly session: Session,
  ) {}

  render(): void {
    this.root.innerHTML = `
      <section class="judgment-view">
        <div class="progress">
          <div class="progress-bar"><div class="progress-fill" style="width: 0%"></div></div>
          <span class="progress-text"></span>
        </div>
        <div class="notice" role="status"></div>
        <div class="task-card">
          <h2 class="topic-text" dir="auto"></h2>
          <p class="passage-text" dir="auto"></p>
        </div>
        <div class="actions">
          <button class="relevant" type="button">Relevant (1)</button>
          <button class="not-relevant" type="button">Not relevant (0)</button>
        </div>
      </section>
    `;
    (this.root.querySelector('.relevant') as HTMLButtonElement).addEventListener(
      'click',
      () => void this.submit(1),
    );
    (this.root.querySelector('.not-relevant') as HTMLButtonElement).addEventListener(
      'click',
      () => void this.submit(0),
    );
    document.addEventListener('keydown', this.keyHandler);
  }

  dispose(): void {
    document.removeEventListener('keydown', this.keyHandler);
  }

  private onKey(event: KeyboardEvent): void {
    const target = event.target as HTMLElement | null;
    if (target && (target.tagName === 'TEXTAREA' || target.tagName === 'INPUT')) return;
    if (event.key === '1') void this.submit(1);
    if (event.key === '0') void this.submit(0);
  }

  /** Fetch and display the next pending task (or the completion screen). */
  async loadNext(): Promise<void> {
    this.current = await this.api.nextTask(this.session.assessor);
    await this.refreshProgress();
    if (!this.current) {
      this.renderDone();
      return;
    }
    (this.root.querySelector('.topic-text') as HTMLElement).textContent =
      this.current.topic_text;
    (this.root.querySelector('.passage-text') as HTMLElement).textContent =
      this.current.passage_text;
  }

  async submit(label: Label): Promise<void> {
    if (!this.current || this.inFlight) return;
    this.inFlight = true;
    this.setButtonsEnabled(false);
    try {
      await this.api.submitJudgment(this.current.task_id, label, this.session.assessor);
      this.setNotice('');
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.setNotice('Task was reassigned elsewhere; fetching the next one.');
      } else {
        this.setNotice('Submission failed; fetching a fresh task.');
      }
    } finally {
      this.inFlight = false;
      this.setButtonsEnabled(true);
    }
    await this.loadNext();
  }

  private async refreshProgress(): Promise<void> {
    const { pending, assigned, done } = await this.api.progress();
    const total = pending + assigned + done;
    const fraction = total > 0 ? done / total : 0;
    (this.root.querySelector('.progress-fill') as HTMLElement).style.width =
      `${(fraction * 100).toFixed(1)}%`;
    (this.root.querySelector('.progress-text') as HTMLElement).textContent =
      `${done} / ${total} judged`;
  }

  private renderDone(): void {
    const card = this.root.querySelector('.task-card') as HTMLElement;
    const done = (this.root.querySelector('.progress-text') as HTMLElement).textContent;
    card.innerHTML = `<h2 class="all-done">All tasks are done.</h2><p>${done ?? ''}</p>`;
    this.setButtonsEnabled(false);
  }

  private setButtonsEnabled(enabled: boolean): void {
    this.root
      .querySelectorAll<HTMLButtonElement>('.actions button')
      .forEach((b) => (b.disabled = !enabled));
  }

  private setNotice(message: string): void {
    (this.root.querySelector('.notice') as HTMLElement).textContent = message;
  }

  get currentTask(): Task | null {
    return this.current;
  }
}
