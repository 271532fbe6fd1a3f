// Decomposition scene: which curves appear and that their values are the
// server rows verbatim.

import { describe, expect, it } from 'vitest';

import { buildDecomposition } from '../src/decomposition.js';
import { DecompositionRow } from '../src/protocol.js';
import { renderDecomposition } from '../src/svg.js';
import boundRows from './fixtures/decomposition-bound.json';

const ROWS = boundRows as unknown as DecompositionRow[];

function row(energy: number, exact: number, mull: { [id: string]: number }): DecompositionRow {
  let smooth = exact;
  for (const v of Object.values(mull)) smooth -= v;
  return {
    energy,
    sigma_exact: exact,
    sigma_pade: exact,
    sigma_int: exact * 0.9,
    mull_terms: mull,
    sigma_smooth: smooth,
    pade_error: 1e-12,
  };
}

describe('buildDecomposition', () => {
  it('shows only the exact curve before any trajectory exists', () => {
    const rows = [row(1, 10, {}), row(2, 11, {})];
    const scene = buildDecomposition(rows);
    expect(scene.curves.map((c) => c.name)).toEqual(['exact']);
  });

  it('adds one Mulholland curve per trajectory plus the smooth remainder', () => {
    const rows = [
      row(1, 10, { tA: 1, tB: 2 }),
      row(2, 11, { tA: 2 }),
      row(3, 12, { tB: 1 }),
    ];
    const scene = buildDecomposition(rows);
    expect(scene.curves.map((c) => c.name)).toEqual(['exact', 'mull:tA', 'mull:tB', 'smooth']);
    const tA = scene.curves[1];
    expect(tA.points).toEqual([[1, 1], [2, 2]]);
    expect(scene.curves[3].points).toEqual([[1, 7], [2, 9], [3, 11]]);
  });

  it('carries the completed run rows through untouched', () => {
    const scene = buildDecomposition(ROWS);
    expect(scene.curves.map((c) => c.name)).toEqual(['exact', 'mull:t1', 'smooth']);
    const exact = scene.curves[0];
    expect(exact.points).toHaveLength(ROWS.length);
    expect(exact.points[10]).toEqual([ROWS[10].energy, ROWS[10].sigma_exact]);
    const mull = scene.curves[1];
    expect(mull.points).toHaveLength(ROWS.filter((r) => 't1' in r.mull_terms).length);
  });

  it('subtraction leaves the smooth curve visibly flatter than the exact one', () => {
    // the resonance spikes live in exact and must be gone from smooth
    const scene = buildDecomposition(ROWS);
    const maxStep = (pts: [number, number][]) => {
      let worst = 0;
      for (let i = 1; i < pts.length; i++) {
        worst = Math.max(worst, Math.abs(pts[i][1] - pts[i - 1][1]));
      }
      return worst;
    };
    const exact = scene.curves.find((c) => c.name === 'exact')!;
    const smooth = scene.curves.find((c) => c.name === 'smooth')!;
    expect(maxStep(smooth.points)).toBeLessThan(0.5 * maxStep(exact.points));
  });
});

describe('renderDecomposition', () => {
  it('draws every curve with its name attached', () => {
    const svg = renderDecomposition(buildDecomposition(ROWS));
    expect(svg.match(/class="series-curve"/g)).toHaveLength(3);
    expect(svg).toContain('data-series="exact"');
    expect(svg).toContain('data-series="mull:t1"');
    expect(svg).toContain('data-series="smooth"');
  });
});
