// Minimal SVG string rendering for the two scenes. Pure string output so the
// scene tests can look at markup without a DOM. Layout constants are pixels.

import { DecompositionScene } from './decomposition.js';
import { dotValue, PoleMapScene, vertexValue } from './polemap.js';

const WIDTH = 860;
const HEIGHT = 420;
const MARGIN_LEFT = 62;
const MARGIN_RIGHT = 16;
const MARGIN_TOP = 18;
const MARGIN_BOTTOM = 40;

const STRING_COLORS = ['#c0392b', '#2980b9', '#27ae60', '#8e44ad', '#d35400'];
const CURVE_COLORS: { [name: string]: string } = {
  exact: '#2c3e50',
  smooth: '#27ae60',
};

interface Scale {
  (value: number): number;
}

function makeScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const span = hi - lo || 1;
  return (value) => outLo + ((value - lo) / span) * (outHi - outLo);
}

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo === Infinity) return [0, 1];
  return lo === hi ? [lo - 0.5, hi + 0.5] : [lo, hi];
}

function frame(xLabel: string, yLabel: string, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${WIDTH} ${HEIGHT}">` +
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="#fdfdfd"/>` +
    `<text class="axis-label" x="${WIDTH / 2}" y="${HEIGHT - 8}" text-anchor="middle">${xLabel}</text>` +
    `<text class="axis-label" x="14" y="${HEIGHT / 2}" text-anchor="middle" transform="rotate(-90 14 ${HEIGHT / 2})">${yLabel}</text>` +
    body +
    '</svg>'
  );
}

function emptyNote(message: string): string {
  return frame('', '', `<text class="empty-note" x="${WIDTH / 2}" y="${HEIGHT / 2}" text-anchor="middle">${message}</text>`);
}

export function renderPoleMap(scene: PoleMapScene): string {
  if (scene.empty) return emptyNote(scene.empty);

  const xs = scene.dots.map((d) => d.energy);
  const ys = scene.dots.map((d) => dotValue(d, scene.axis));
  for (const s of scene.strings) {
    for (const seg of s.segments) {
      for (const v of seg) {
        xs.push(v.energy);
        ys.push(vertexValue(v, scene.axis));
      }
    }
  }
  const [xLo, xHi] = extent(xs);
  const [yLo, yHi] = extent(ys);
  const sx = makeScale(xLo, xHi, MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
  const sy = makeScale(yLo, yHi, HEIGHT - MARGIN_BOTTOM, MARGIN_TOP);

  const parts: string[] = [];
  scene.strings.forEach((s, i) => {
    const color = STRING_COLORS[i % STRING_COLORS.length];
    for (const seg of s.segments) {
      const pts = seg
        .map((v) => `${sx(v.energy).toFixed(1)},${sy(vertexValue(v, scene.axis)).toFixed(1)}`)
        .join(' ');
      parts.push(
        `<polyline class="trajectory-string" data-trajectory="${s.id}" points="${pts}" ` +
          `fill="none" stroke="${color}" stroke-width="${s.active ? 2.5 : 1.5}"/>`,
      );
    }
  });
  for (const d of scene.dots) {
    parts.push(
      `<circle class="pole-dot" data-energy-index="${d.energyIndex}" data-pole-index="${d.poleIndex}" ` +
        `cx="${sx(d.energy).toFixed(1)}" cy="${sy(dotValue(d, scene.axis)).toFixed(1)}" r="3"/>`,
    );
  }
  const yLabel = scene.axis === 're' ? 'Re J' : 'Im J';
  return frame('E (meV)', yLabel, parts.join(''));
}

export function renderDecomposition(scene: DecompositionScene): string {
  if (scene.curves.length === 0) return emptyNote('no series yet');

  const xs: number[] = [];
  const ys: number[] = [];
  for (const c of scene.curves) {
    for (const [x, y] of c.points) {
      xs.push(x);
      ys.push(y);
    }
  }
  const [xLo, xHi] = extent(xs);
  const [yLo, yHi] = extent(ys);
  const sx = makeScale(xLo, xHi, MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
  const sy = makeScale(yLo, yHi, HEIGHT - MARGIN_BOTTOM, MARGIN_TOP);

  const parts: string[] = [];
  let mullSeen = 0;
  for (const c of scene.curves) {
    const color = CURVE_COLORS[c.name] ?? STRING_COLORS[mullSeen++ % STRING_COLORS.length];
    const pts = c.points
      .map(([x, y]) => `${sx(x).toFixed(1)},${sy(y).toFixed(1)}`)
      .join(' ');
    parts.push(
      `<polyline class="series-curve" data-series="${c.name}" points="${pts}" fill="none" stroke="${color}" stroke-width="1.5"/>`,
    );
  }
  return frame('E (meV)', 'cross section (A^2)', parts.join(''));
}
