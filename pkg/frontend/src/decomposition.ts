// Scene builder for the decomposition view: the exact cross section, one
// Mulholland curve per completed trajectory, and the smooth remainder once
// any subtraction exists. All values are copied from server rows verbatim.

import { DecompositionRow } from './protocol.js';

export interface Curve {
  name: string;
  points: [number, number][];
}

export interface DecompositionScene {
  curves: Curve[];
}

export function buildDecomposition(rows: DecompositionRow[]): DecompositionScene {
  const curves: Curve[] = [
    { name: 'exact', points: rows.map((r) => [r.energy, r.sigma_exact]) },
  ];
  const ids = new Set<string>();
  for (const row of rows) {
    for (const id of Object.keys(row.mull_terms)) ids.add(id);
  }
  for (const id of [...ids].sort()) {
    curves.push({
      name: `mull:${id}`,
      points: rows
        .filter((r) => id in r.mull_terms)
        .map((r) => [r.energy, r.mull_terms[id]]),
    });
  }
  if (ids.size > 0) {
    curves.push({
      name: 'smooth',
      points: rows.map((r) => [r.energy, r.sigma_smooth]),
    });
  }
  return { curves };
}
