/**
 * Entry point: asks for an assessor id once (kept in localStorage), then
 * switches between the topic-creation and judgment views.
 */

import { AnnotationApi } from './api.js';
import { JudgmentView } from './judgmentView.js';
import { Session } from './session.js';
import { TopicView } from './topicView.js';

const DEFAULT_SERVICE_URL = 'http://127.0.0.1:8765';

export function bootstrap(root: HTMLElement, serviceUrl: string = DEFAULT_SERVICE_URL): void {
  const session = new Session();
  const api = new AnnotationApi(serviceUrl);

  if (!session.assessor) {
    const entered = window.prompt('Assessor id:') ?? '';
    session.assessor = entered.trim();
  }

  root.innerHTML = `
    <header class="topbar">
      <strong>poolkit annotation</strong>
      <span class="assessor">assessor: ${session.assessor || 'anonymous'}</span>
      <nav>
        <button type="button" data-view="topics">Create topics</button>
        <button type="button" data-view="judge">Judge passages</button>
      </nav>
    </header>
    <main class="view-root"></main>
  `;
  const viewRoot = root.querySelector('.view-root') as HTMLElement;

  let judgmentView: JudgmentView | null = null;

  const showTopics = () => {
    judgmentView?.dispose();
    judgmentView = null;
    new TopicView(viewRoot, api, session).render();
  };

  const showJudge = () => {
    judgmentView?.dispose();
    judgmentView = new JudgmentView(viewRoot, api, session);
    judgmentView.render();
    void judgmentView.loadNext();
  };

  root.querySelectorAll<HTMLButtonElement>('nav button').forEach((button) => {
    button.addEventListener('click', () =>
      button.dataset.view === 'topics' ? showTopics() : showJudge(),
    );
  });

  showTopics();
}

declare global {
  interface Window {
    poolkitBootstrap: typeof bootstrap;
  }
}

if (typeof window !== 'undefined') {
  window.poolkitBootstrap = bootstrap;
}
