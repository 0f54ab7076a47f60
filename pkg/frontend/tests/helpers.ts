/** Scripted fetch implementations for view tests. */

import type { FetchLike, Progress, Task } from '../src/api.js';

export interface RecordedCall {
  url: string;
  method: string;
  body: unknown;
}

export interface ScriptedServer {
  fetchFn: FetchLike;
  calls: RecordedCall[];
}

export function makeTask(overrides: Partial<Task> = {}): Task {
  return {
    task_id: 't1::d01',
    topic_id: 't1',
    passage_id: 'd01',
    pseudo_rank: 1,
    topic_text: 'ما هي عقوبة التهرب الضريبي',
    passage_text: 'المادة 3 يعاقب كل من تهرب من دفع الضريبة بغرامة مالية.',
    lease_expires_at: 9e9,
    ...overrides,
  };
}

/**
 * A fake annotation service: a queue of tasks, canned progress, and a
 * recorder of every request the views make.
 */
export function scriptedServer(
  tasks: (Task | null)[],
  progress: Progress = { pending: 9, assigned: 1, done: 0 },
  judgmentStatus = 200,
): ScriptedServer {
  const calls: RecordedCall[] = [];
  const queue = [...tasks];

  const fetchFn: FetchLike = async (url, init) => {
    const method = init?.method ?? 'GET';
    const body = init?.body ? JSON.parse(init.body as string) : undefined;
    calls.push({ url, method, body });

    if (url.includes('/tasks/next')) {
      const task = queue.length ? queue.shift()! : null;
      return jsonResponse({ task });
    }
    if (url.includes('/judgments')) {
      if (judgmentStatus !== 200) {
        return jsonResponse({ detail: 'lease conflict' }, judgmentStatus);
      }
      return jsonResponse({ ok: true });
    }
    if (url.includes('/progress')) {
      return jsonResponse(progress);
    }
    if (url.includes('/topics')) {
      if (!String(body?.text ?? '').trim()) {
        return jsonResponse({ detail: 'topic text must be non-empty' }, 400);
      }
      return jsonResponse({ topic_id: 't1', text: body.text, author: body.author });
    }
    throw new Error(`unexpected request: ${method} ${url}`);
  };

  return { fetchFn, calls };
}

export function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}

export function failingFetch(calls: RecordedCall[]): FetchLike {
  return async (url, init) => {
    calls.push({
      url,
      method: init?.method ?? 'GET',
      body: init?.body ? JSON.parse(init.body as string) : undefined,
    });
    throw new TypeError('network down');
  };
}
