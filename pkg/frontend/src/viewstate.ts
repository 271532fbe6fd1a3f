// Client-side mirror of the server session plus what the user is looking at.
// The session field is only ever replaced wholesale by a server response.

import { SessionExport, TrajectorySummary } from './protocol.js';

export type PoleAxis = 're' | 'im';

export interface HoverTarget {
  energyIndex: number;
  poleIndex: number;
}

export class ViewState {
  session: SessionExport | null = null;
  selectedTrajectoryId: string | null = null;
  hover: HoverTarget | null = null;
  axis: PoleAxis = 're';
  // Set when the session came from a file instead of a live server.
  readOnly = false;

  hasPole(energyIndex: number, poleIndex: number): boolean {
    if (!this.session) return false;
    const column = this.session.poles_by_energy[energyIndex];
    return column !== undefined && poleIndex >= 0 && poleIndex < column.length;
  }

  activeTrajectory(): TrajectorySummary | null {
    if (!this.session) return null;
    return this.session.trajectories.find((t) => t.active) ?? null;
  }

  atLastEnergy(): boolean {
    if (!this.session) return true;
    return this.session.current_energy_index >= this.session.energies.length - 1;
  }
}
