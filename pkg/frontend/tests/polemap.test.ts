// Pole-map scene construction: the trajectory string, gap breaks, the axis
// toggle, and the empty states, plus a smoke pass over the SVG output.

import { describe, expect, it } from 'vitest';

import { buildPoleMap } from '../src/polemap.js';
import { SessionExport, TrajectorySummary } from '../src/protocol.js';
import { renderPoleMap } from '../src/svg.js';
import bound from './fixtures/session-bound.json';

const BOUND = bound as unknown as SessionExport;

function bareSession(overrides: Partial<SessionExport> = {}): SessionExport {
  return {
    energies: [],
    current_energy_index: 0,
    poles_by_energy: [],
    trajectories: [],
    series: {},
    config: {},
    ...overrides,
  };
}

describe('buildPoleMap', () => {
  it('draws the completed run as one continuous string', () => {
    const scene = buildPoleMap(BOUND, 're');
    expect(scene.empty).toBeNull();
    expect(scene.strings).toHaveLength(1);
    const s = scene.strings[0];
    expect(s.id).toBe('t1');
    expect(s.segments).toHaveLength(1);
    expect(s.segments[0]).toHaveLength(98);
    const energies = s.segments[0].map((v) => v.energy);
    for (let i = 1; i < energies.length; i++) {
      expect(energies[i]).toBeGreaterThan(energies[i - 1]);
    }
    // every vertex sits on a plotted pole
    const dotKeys = new Set(scene.dots.map((d) => `${d.energy}:${d.re}:${d.im}`));
    for (const v of s.segments[0]) {
      expect(dotKeys.has(`${v.energy}:${v.re}:${v.im}`)).toBe(true);
    }
  });

  it('plots one dot per retained pole', () => {
    const scene = buildPoleMap(BOUND, 're');
    const expected = BOUND.poles_by_energy.reduce((n, col) => n + col.length, 0);
    expect(scene.dots).toHaveLength(expected);
  });

  it('keeps dot order identical when toggling to the Im view', () => {
    const re = buildPoleMap(BOUND, 're');
    const im = buildPoleMap(BOUND, 'im');
    const key = (scene: typeof re) =>
      scene.dots.map((d) => `${d.energyIndex}/${d.poleIndex}`);
    expect(key(im)).toEqual(key(re));
  });

  it('breaks the string at recorded gaps', () => {
    const traj: TrajectorySummary = {
      id: 't1',
      active: false,
      energies: [1, 2, 4, 5],
      re_j: [4.1, 4.2, 4.4, 4.5],
      im_j: [0.01, 0.02, 0.04, 0.05],
      mull: [],
      gaps: [3],
    };
    const session = bareSession({
      energies: [1, 2, 3, 4, 5],
      poles_by_energy: [[[4.1, 0.01, 0, 0]], [[4.2, 0.02, 0, 0]], [],
                        [[4.4, 0.04, 0, 0]], [[4.5, 0.05, 0, 0]]],
      trajectories: [traj],
    });
    const scene = buildPoleMap(session, 're');
    expect(scene.strings[0].segments.map((seg) => seg.length)).toEqual([2, 2]);
  });

  it('reports the empty states', () => {
    expect(buildPoleMap(null, 're').empty).toBe('no session loaded');
    const hollow = bareSession({ energies: [1, 2], poles_by_energy: [[], []] });
    expect(buildPoleMap(hollow, 're').empty).toBe('session has no poles');
  });
});

describe('renderPoleMap', () => {
  it('emits one polyline per string segment and one circle per pole', () => {
    const scene = buildPoleMap(BOUND, 're');
    const svg = renderPoleMap(scene);
    expect(svg.match(/class="trajectory-string"/g)).toHaveLength(1);
    expect(svg.match(/data-trajectory="t1"/g)).toHaveLength(1);
    expect(svg.match(/class="pole-dot"/g)).toHaveLength(scene.dots.length);
    expect(svg).toContain('>Re J<');
  });

  it('renders the empty message instead of axes', () => {
    const svg = renderPoleMap(buildPoleMap(null, 're'));
    expect(svg).toContain('no session loaded');
    expect(svg).not.toContain('pole-dot');
  });
});
