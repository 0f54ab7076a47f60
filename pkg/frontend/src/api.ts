/**
 * Typed client for the annotation service HTTP API.
 *
 * Endpoints:
 *   POST /topics            {text, author}        -> {topic_id, ...}
 *   GET  /tasks/next?assessor=...                 -> {task: Task | null}
 *   POST /judgments         {task_id, label, assessor}
 *   GET  /progress                                -> {pending, assigned, done}
 *   GET  /export/qrels                            -> text/plain
 */

export interface Task {
  task_id: string;
  topic_id: string;
  passage_id: string;
  pseudo_rank: number;
  topic_text: string;
  passage_text: string;
  lease_expires_at: number;
}

export interface Progress {
  pending: number;
  assigned: number;
  done: number;
}

export interface TopicCreated {
  topic_id: string;
  text: string;
  author: string;
}

export type Label = 0 | 1;

/** Error carrying the HTTP status so views can tell conflicts from failures. */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class AnnotationApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = await response.json();
        if (body && typeof body.detail === 'string') detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return response;
  }

  private post(path: string, body: unknown): Promise<Response> {
    return this.request(path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
  }

  async createTopic(text: string, author: string): Promise<TopicCreated> {
    const response = await this.post('/topics', { text, author });
    return response.json();
  }

  async nextTask(assessor: string): Promise<Task | null> {
    const response = await this.request(
      `/tasks/next?assessor=${encodeURIComponent(assessor)}`,
    );
    const body = await response.json();
    return body.task ?? null;
  }

  async submitJudgment(taskId: string, label: Label, assessor: string): Promise<void> {
    await this.post('/judgments', { task_id: taskId, label, assessor });
  }

  async progress(): Promise<Progress> {
    const response = await this.request('/progress');
    return response.json();
  }

  async exportQrels(): Promise<string> {
    const response = await this.request('/export/qrels');
    return response.text();
  }
}
