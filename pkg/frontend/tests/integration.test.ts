/**
 * End-to-end flow against the real annotation service on a toy fixture:
 * create one topic and judge ten passages through the views, then check the
 * qrels export holds exactly those ten lines with the chosen labels.
 */

import { spawn, type ChildProcess } from 'node:child_process';
import { mkdtempSync, rmSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { AnnotationApi } from '../src/api.js';
import { JudgmentView } from '../src/judgmentView.js';
import { Session } from '../src/session.js';
import { TopicView } from '../src/topicView.js';

const PORT = 8911 + (process.pid % 50);
const BASE = `http://127.0.0.1:${PORT}`;

let child: ChildProcess;
let workDir: string;

function writeFixture(dir: string): void {
  writeFileSync(
    join(dir, 'topics.jsonl'),
    JSON.stringify({ topic_id: 't1', text: 'ما هي عقوبة التهرب الضريبي' }) + '\n',
  );
  const passages = Array.from({ length: 10 }, (_, i) => ({
    passage_id: `d${String(i + 1).padStart(2, '0')}`,
    parent_doc: 'doc1',
    text: `المادة ${i + 1} نص المقطع رقم ${i + 1}`,
    word_count: 6,
    chunk_method: 'structural',
  }));
  writeFileSync(
    join(dir, 'passages.jsonl'),
    passages.map((p) => JSON.stringify(p)).join('\n') + '\n',
  );
  writeFileSync(
    join(dir, 'pq.json'),
    JSON.stringify({
      provenance: { scorers: ['ce'], rrf_k: 60, depth: 10 },
      entries: passages.map((p, i) => ['t1', p.passage_id, i + 1]),
    }),
  );
}

async function waitForService(): Promise<void> {
  for (let attempt = 0; attempt < 60; attempt++) {
    try {
      const response = await fetch(`${BASE}/progress`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error('annotation service did not come up');
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), 'poolkit-ui-'));
  writeFixture(workDir);
  child = spawn(
    'python3',
    [
      '-m', 'poolkit.cli', 'serve',
      '--log', join(workDir, 'log.jsonl'),
      '--topics', join(workDir, 'topics.jsonl'),
      '--pseudo-qrels', join(workDir, 'pq.json'),
      '--passages', join(workDir, 'passages.jsonl'),
      '--port', String(PORT),
    ],
    { stdio: 'ignore' },
  );
  await waitForService();
});

afterAll(() => {
  child?.kill();
  rmSync(workDir, { recursive: true, force: true });
});

describe('browser flow against the live service', () => {
  it('creates a topic and judges all ten tasks; export matches the chosen labels', async () => {
    const session = new Session(window.localStorage);
    session.assessor = 'assessor-e2e';
    const api = new AnnotationApi(BASE, (url, init) => fetch(url, init));

    // create one topic through the topic view
    const topicRoot = document.createElement('div');
    document.body.appendChild(topicRoot);
    const topicView = new TopicView(topicRoot, api, session);
    topicView.render();
    (topicRoot.querySelector('.topic-text') as HTMLTextAreaElement).value =
      'شروط الترشح للانتخابات المحلية';
    await topicView.submit();
    expect(topicRoot.querySelector('.feedback')?.textContent).toMatch(/t\d+/);

    // judge all ten pre-loaded tasks through the judgment view
    const judgeRoot = document.createElement('div');
    document.body.appendChild(judgeRoot);
    const view = new JudgmentView(judgeRoot, api, session);
    view.render();
    await view.loadNext();

    const chosen: Record<string, 0 | 1> = {};
    for (let i = 0; view.currentTask !== null && i < 20; i++) {
      const task = view.currentTask;
      const label: 0 | 1 = task.pseudo_rank <= 4 ? 1 : 0;
      chosen[task.passage_id] = label;
      await view.submit(label);
    }
    view.dispose();

    expect(Object.keys(chosen)).toHaveLength(10);
    expect(judgeRoot.querySelector('.all-done')).not.toBeNull();

    const exported = await api.exportQrels();
    const lines = exported.trim().split('\n');
    expect(lines).toHaveLength(10);
    for (const line of lines) {
      const [topic, zero, passage, label] = line.split(' ');
      expect(topic).toBe('t1');
      expect(zero).toBe('0');
      expect(Number(label)).toBe(chosen[passage]);
    }

    const progress = await api.progress();
    expect(progress).toEqual({ pending: 0, assigned: 0, done: 10 });
  });
});
