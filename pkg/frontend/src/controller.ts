// Session controller: owns the view state and funnels every mutation through
// the protocol client. The server response is the single source of truth; on
// a protocol error the local state is left exactly as it was and the message
// goes to a non-blocking toast.

import {
  DecompositionRow,
  ProtocolClient,
  ProtocolError,
  SessionExport,
  StepChoice,
} from './protocol.js';
import { ViewState } from './viewstate.js';

export class SessionController {
  readonly view = new ViewState();
  decomposition: DecompositionRow[] = [];
  // True while an auto-follow loop is draining energies; manual input is
  // rejected up front so it cannot interleave with the loop's requests.
  following = false;

  constructor(
    private client: ProtocolClient,
    private onChange: () => void = () => {},
    private onToast: (message: string) => void = () => {},
  ) {}

  private apply(session: SessionExport): void {
    this.view.session = session;
    const active = this.view.activeTrajectory();
    if (active) this.view.selectedTrajectoryId = active.id;
    this.onChange();
  }

  private toast(message: string): void {
    this.onToast(message);
  }

  async load(): Promise<void> {
    this.view.readOnly = false;
    this.apply(await this.client.getSession());
  }

  // Post-hoc viewing of an exported session file; nothing can be mutated.
  loadFile(data: SessionExport): void {
    this.view.readOnly = true;
    this.apply(data);
  }

  private rejectInput(): string | null {
    if (this.view.readOnly) return 'read-only session: no live server';
    if (this.following) return 'auto-follow is running';
    return null;
  }

  async seedPole(energyIndex: number, poleIndex: number): Promise<boolean> {
    const blocked = this.rejectInput();
    if (blocked) {
      this.toast(blocked);
      return false;
    }
    if (!this.view.hasPole(energyIndex, poleIndex)) {
      this.toast(`no pole ${poleIndex} at energy index ${energyIndex}`);
      return false;
    }
    try {
      this.apply(await this.client.seed(energyIndex, poleIndex));
      return true;
    } catch (err) {
      this.toastError(err);
      return false;
    }
  }

  async stepChoice(choice: StepChoice): Promise<boolean> {
    const blocked = this.rejectInput();
    if (blocked) {
      this.toast(blocked);
      return false;
    }
    if (typeof choice === 'number') {
      const session = this.view.session;
      if (!session || !this.view.hasPole(session.current_energy_index + 1, choice)) {
        this.toast(`no pole ${choice} at the next energy`);
        return false;
      }
    }
    try {
      this.apply(await this.client.step(choice));
      return true;
    } catch (err) {
      this.toastError(err);
      return false;
    }
  }

  // Drain the remaining energies with the server's own nearest-pole rule.
  async autoFollowToEnd(): Promise<void> {
    const blocked = this.rejectInput();
    if (blocked) {
      this.toast(blocked);
      return;
    }
    this.following = true;
    try {
      while (!this.view.atLastEnergy()) {
        this.apply(await this.client.step('auto'));
      }
    } catch (err) {
      this.toastError(err);
    } finally {
      this.following = false;
    }
  }

  async finishTrajectory(): Promise<string | null> {
    const blocked = this.rejectInput();
    if (blocked) {
      this.toast(blocked);
      return null;
    }
    try {
      const resp = await this.client.finish();
      this.apply(resp.session);
      this.toast(`trajectory ${resp.finished} written`);
      return resp.finished;
    } catch (err) {
      this.toastError(err);
      return null;
    }
  }

  async refreshDecomposition(): Promise<void> {
    if (this.view.readOnly) return;
    try {
      this.decomposition = await this.client.getDecomposition();
      this.onChange();
    } catch (err) {
      this.toastError(err);
    }
  }

  private toastError(err: unknown): void {
    if (err instanceof ProtocolError) {
      this.toast(err.message);
    } else {
      this.toast(String(err));
    }
  }
}
