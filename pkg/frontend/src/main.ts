// Browser entry point: wires the controller to the page. Clicking a pole
// seeds a trajectory (or picks the next pole while following by hand); the
// buttons drive auto-follow, skip, and finish; the decomposition panel
// re-renders after every server confirmation.

import { SessionController } from './controller.js';
import { buildDecomposition } from './decomposition.js';
import { buildPoleMap } from './polemap.js';
import { ProtocolClient, SessionExport } from './protocol.js';
import { renderDecomposition, renderPoleMap } from './svg.js';

const poleMapHost = document.getElementById('pole-map') as HTMLDivElement;
const decompHost = document.getElementById('decomposition') as HTMLDivElement;
const statusLine = document.getElementById('status-line') as HTMLDivElement;
const toastHost = document.getElementById('toasts') as HTMLDivElement;

const axisToggle = document.getElementById('axis-toggle') as HTMLButtonElement;
const autoBtn = document.getElementById('auto-btn') as HTMLButtonElement;
const skipBtn = document.getElementById('skip-btn') as HTMLButtonElement;
const finishBtn = document.getElementById('finish-btn') as HTMLButtonElement;
const fileInput = document.getElementById('session-file') as HTMLInputElement;

function showToast(message: string): void {
  const node = document.createElement('div');
  node.className = 'toast';
  node.textContent = message;
  toastHost.appendChild(node);
  setTimeout(() => node.remove(), 4000);
}

const controller = new SessionController(new ProtocolClient(), render, showToast);

function render(): void {
  const session = controller.view.session;
  poleMapHost.innerHTML = renderPoleMap(buildPoleMap(session, controller.view.axis));
  decompHost.innerHTML = renderDecomposition(buildDecomposition(controller.decomposition));
  if (!session) {
    statusLine.textContent = 'no session';
    return;
  }
  const e = session.energies[session.current_energy_index];
  const active = controller.view.activeTrajectory();
  const mode = controller.view.readOnly ? 'read-only file' : 'live session';
  statusLine.textContent =
    `${mode} | E = ${e} meV (index ${session.current_energy_index})` +
    (active ? ` | following ${active.id}` : ' | no active trajectory');
}

poleMapHost.addEventListener('click', (ev) => {
  const target = ev.target as Element;
  const dot = target.closest('circle.pole-dot');
  if (!dot) return;
  const energyIndex = Number(dot.getAttribute('data-energy-index'));
  const poleIndex = Number(dot.getAttribute('data-pole-index'));
  const session = controller.view.session;
  if (session && controller.view.activeTrajectory()) {
    if (energyIndex === session.current_energy_index + 1) {
      void controller.stepChoice(poleIndex).then(refreshSeries);
    } else {
      showToast('a trajectory is active: click a pole at the next energy, or skip');
    }
  } else {
    void controller.seedPole(energyIndex, poleIndex).then(refreshSeries);
  }
});

function refreshSeries(changed: boolean | string | null): void {
  if (changed) void controller.refreshDecomposition();
}

axisToggle.addEventListener('click', () => {
  controller.view.axis = controller.view.axis === 're' ? 'im' : 're';
  axisToggle.textContent = controller.view.axis === 're' ? 'show Im J' : 'show Re J';
  render();
});

autoBtn.addEventListener('click', () => {
  void controller.autoFollowToEnd().then(() => refreshSeries(true));
});

skipBtn.addEventListener('click', () => {
  void controller.stepChoice('skip').then(refreshSeries);
});

finishBtn.addEventListener('click', () => {
  void controller.finishTrajectory().then(refreshSeries);
});

fileInput.addEventListener('change', () => {
  const file = fileInput.files && fileInput.files[0];
  if (!file) return;
  void file.text().then((text) => {
    controller.loadFile(JSON.parse(text) as SessionExport);
    showToast(`loaded ${file.name} (read-only)`);
  });
});

// A live server is the normal case; fall back to the file picker without it.
void controller
  .load()
  .then(() => controller.refreshDecomposition())
  .catch(() => {
    showToast('no live session: load an exported session file');
    render();
  });
