// Scene builder for the pole map: every retained pole as a dot over energy,
// every trajectory as a polyline string broken at its gaps. Dots and string
// vertices carry the server's numbers untouched; picking an axis only decides
// which coordinate the renderer reads.

import { SessionExport } from './protocol.js';
import { PoleAxis } from './viewstate.js';

export interface PoleDot {
  energy: number;
  re: number;
  im: number;
  energyIndex: number;
  poleIndex: number;
}

export interface StringVertex {
  energy: number;
  re: number;
  im: number;
}

export interface TrajectoryString {
  id: string;
  active: boolean;
  // One run of consecutive entries per segment; a recorded gap between two
  // entries splits the polyline so the hole stays visible.
  segments: StringVertex[][];
}

export interface PoleMapScene {
  axis: PoleAxis;
  dots: PoleDot[];
  strings: TrajectoryString[];
  empty: string | null;
}

export function buildPoleMap(
  session: SessionExport | null,
  axis: PoleAxis,
): PoleMapScene {
  if (!session) {
    return { axis, dots: [], strings: [], empty: 'no session loaded' };
  }
  const dots: PoleDot[] = [];
  session.poles_by_energy.forEach((column, energyIndex) => {
    column.forEach((row, poleIndex) => {
      dots.push({
        energy: session.energies[energyIndex],
        re: row[0],
        im: row[1],
        energyIndex,
        poleIndex,
      });
    });
  });

  const strings = session.trajectories.map((t) => {
    const segments: StringVertex[][] = [];
    let current: StringVertex[] = [];
    for (let i = 0; i < t.energies.length; i++) {
      const prev = t.energies[i - 1];
      const broken = t.gaps.some((g) => prev !== undefined && prev < g && g < t.energies[i]);
      if (broken && current.length > 0) {
        segments.push(current);
        current = [];
      }
      current.push({ energy: t.energies[i], re: t.re_j[i], im: t.im_j[i] });
    }
    if (current.length > 0) segments.push(current);
    return { id: t.id, active: t.active, segments };
  });

  if (dots.length === 0) {
    return { axis, dots, strings, empty: 'session has no poles' };
  }
  return { axis, dots, strings, empty: null };
}

export function dotValue(dot: PoleDot, axis: PoleAxis): number {
  return axis === 're' ? dot.re : dot.im;
}

export function vertexValue(v: StringVertex, axis: PoleAxis): number {
  return axis === 're' ? v.re : v.im;
}
