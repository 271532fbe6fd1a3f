// Request shapes on the wire: paths, methods, bodies, and error mapping.

import { describe, expect, it } from 'vitest';

import { FetchLike, ProtocolClient, ProtocolError } from '../src/protocol.js';

interface Captured {
  url: string;
  init?: { method?: string; headers?: { [k: string]: string }; body?: string };
}

function capturing(responses: { status: number; body: unknown }[]) {
  const calls: Captured[] = [];
  const fetchFn: FetchLike = async (url, init) => {
    calls.push({ url, init });
    const next = responses.shift() ?? { status: 200, body: {} };
    return {
      ok: next.status < 400,
      status: next.status,
      json: async () => next.body,
    };
  };
  return { calls, client: new ProtocolClient('', fetchFn) };
}

describe('ProtocolClient', () => {
  it('fetches the session with a bare GET', async () => {
    const { calls, client } = capturing([{ status: 200, body: { energies: [1] } }]);
    const session = await client.getSession();
    expect(calls).toHaveLength(1);
    expect(calls[0].url).toBe('/api/session');
    expect(calls[0].init).toBeUndefined();
    expect(session.energies).toEqual([1]);
  });

  it('posts seed selections as JSON', async () => {
    const { calls, client } = capturing([{ status: 200, body: {} }]);
    await client.seed(2, 0);
    expect(calls[0].url).toBe('/api/trajectory/seed');
    expect(calls[0].init?.method).toBe('POST');
    expect(calls[0].init?.headers).toEqual({ 'content-type': 'application/json' });
    expect(JSON.parse(calls[0].init?.body ?? '')).toEqual({ energy_index: 2, pole_index: 0 });
  });

  it('posts every step choice shape verbatim', async () => {
    const { calls, client } = capturing([
      { status: 200, body: {} },
      { status: 200, body: {} },
      { status: 200, body: {} },
    ]);
    await client.step('auto');
    await client.step('skip');
    await client.step(3);
    const bodies = calls.map((c) => JSON.parse(c.init?.body ?? ''));
    expect(bodies).toEqual([{ choice: 'auto' }, { choice: 'skip' }, { choice: 3 }]);
    expect(calls.every((c) => c.url === '/api/trajectory/step')).toBe(true);
  });

  it('finishes and hands back the finished id with the refreshed session', async () => {
    const { calls, client } = capturing([
      { status: 200, body: { finished: 't2', session: { energies: [] } } },
    ]);
    const resp = await client.finish();
    expect(calls[0].url).toBe('/api/trajectory/finish');
    expect(resp.finished).toBe('t2');
  });

  it('maps protocol failures onto ProtocolError with the server detail', async () => {
    const { client } = capturing([{ status: 400, body: { detail: 'no active trajectory' } }]);
    const err = await client.step('auto').catch((e) => e);
    expect(err).toBeInstanceOf(ProtocolError);
    expect(err.status).toBe(400);
    expect(err.message).toBe('no active trajectory');
  });

  it('keeps a usable message when the error body is not JSON', async () => {
    const calls: Captured[] = [];
    const fetchFn: FetchLike = async (url, init) => {
      calls.push({ url, init });
      return {
        ok: false,
        status: 502,
        json: async () => {
          throw new Error('not json');
        },
      };
    };
    const client = new ProtocolClient('', fetchFn);
    const err = await client.getSession().catch((e) => e);
    expect(err).toBeInstanceOf(ProtocolError);
    expect(err.message).toBe('request failed (502)');
  });
});
