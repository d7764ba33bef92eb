// Application shell: curve editor on the left, generated-design panel
// with what-if sliders, badges, history, and 3D preview on the right.

import { ApiClient, ApiError, isAbort } from './api';
import { isSubmittable, rampDraft, toCurveArrays } from './curve';
import type { CurveDraft } from './curve';
import { CurveEditor } from './editor';
import { History, exportState, importState } from './history';
import {
  energyBeforeThresholdJ,
  peakForceN,
  relativeError,
  resampleToGrid,
  workJ,
} from './metrics';
import { CurvePlot } from './plot';
import { SLIDERS, clampField } from './ranges';
import { MATERIALS } from './types';
import type { CurveArrays, Design, Material, Metrics, Printability } from './types';
import { debounce } from './debounce';
import type { Debounced } from './debounce';
import { MeshViewer } from './viewer';

/** Client/server metric agreement required on every completed request. */
export const CROSSCHECK_TOLERANCE = 1e-6;

export interface AppOptions {
  /** Slider settle time before a what-if request fires. */
  debounceMs?: number;
}

const PAGE = `
<div class="toolbar">
  <label>alpha <select id="alpha-select"></select></label>
  <button id="ramp-preset" title="start from a two-point ramp">ramp preset</button>
  <button id="clear-draft">clear</button>
  <span class="spacer"></span>
  <button id="export-btn">export state</button>
  <button id="import-btn">import state</button>
  <span id="health"></span>
</div>
<textarea id="state-io" rows="3" placeholder="exported state appears here; paste to import"></textarea>
<div class="columns">
  <section class="panel">
    <h2>Target curve</h2>
    <canvas id="editor-canvas" width="620" height="380"></canvas>
    <p id="empty-state">Click the canvas to add control points, or start from the ramp preset.</p>
    <div class="readouts">
      <span>work <b id="target-work">–</b> J</span>
      <span>peak <b id="target-peak">–</b> N</span>
      <span>E_F <b id="target-ef">–</b> J</span>
    </div>
    <div class="impact">
      <label>F threshold <input id="threshold-input" type="number" value="10" min="0.1" step="0.5"> N</label>
      <label>target E <input id="energy-input" type="number" value="0.05" min="0" step="0.005"> J</label>
      <span id="impact-badge"></span>
    </div>
    <button id="invert-btn" disabled>generate design</button>
  </section>
  <section class="panel">
    <h2>Generated design</h2>
    <div class="badges">
      <span id="badge-perimeter" class="badge"></span>
      <span id="badge-axis" class="badge"></span>
    </div>
    <table id="design-table"><tbody></tbody></table>
    <div id="sliders"></div>
    <label>material <select id="material-select"></select></label>
    <div class="readouts">
      <span>stiffness <b id="m-stiffness">–</b> N/mm</span>
      <span>work <b id="m-work">–</b> J</span>
      <span>max disp <b id="m-maxdisp">–</b> mm</span>
    </div>
    <p id="crosscheck"></p>
  </section>
  <section class="panel">
    <h2>Preview</h2>
    <canvas id="viewer-canvas" width="380" height="320"></canvas>
    <button id="mesh-btn" disabled>refresh preview</button>
    <h2>History</h2>
    <div id="history-strip"></div>
  </section>
</div>
<div id="error-banner" hidden><span id="error-text"></span><button id="retry-btn">retry</button></div>
`;

export class App {
  readonly client: ApiClient;
  private readonly root: HTMLElement;
  private readonly plot: CurvePlot;
  private readonly editor: CurveEditor;
  private readonly viewer: MeshViewer;
  private readonly history = new History();
  private readonly tasks = new Set<Promise<unknown>>();
  private readonly whatIfDebounced: Debounced<[]>;

  private design: Design | null = null;
  private predicted: CurveArrays | null = null;
  private alpha = 1;
  private whatIfCount = 0;
  private lastFailed: (() => void) | null = null;

  constructor(root: HTMLElement, client: ApiClient, options: AppOptions = {}) {
    this.root = root;
    this.client = client;
    root.innerHTML = PAGE;

    this.plot = new CurvePlot(this.el<HTMLCanvasElement>('editor-canvas'));
    this.editor = new CurveEditor(this.el('editor-canvas'), () => this.onDraftChange());
    this.viewer = new MeshViewer(this.el<HTMLCanvasElement>('viewer-canvas'));
    this.whatIfDebounced = debounce(() => {
      this.track(this.runWhatIf());
    }, options.debounceMs ?? 150);

    this.buildSliders();
    this.wireToolbar();
    this.el('invert-btn').addEventListener('click', () => this.track(this.runInverse()));
    this.el('mesh-btn').addEventListener('click', () => this.track(this.refreshPreview()));
    this.el('threshold-input').addEventListener('input', () => this.onDraftChange());
    this.el('energy-input').addEventListener('input', () => this.onDraftChange());
    this.el('retry-btn').addEventListener('click', () => {
      this.hideError();
      const retry = this.lastFailed;
      this.lastFailed = null;
      retry?.();
    });
    this.onDraftChange();
  }

  // ------------------------------------------------------------------
  // element access and task tracking

  private el<T extends HTMLElement = HTMLElement>(id: string): T {
    const node = this.root.querySelector(`#${id}`);
    if (!node) throw new Error(`missing element #${id}`);
    return node as T;
  }

  private track<T>(p: Promise<T>): Promise<T> {
    this.tasks.add(p);
    void p.catch(() => undefined).finally(() => this.tasks.delete(p));
    return p;
  }

  /** Resolves once all in-flight work (requests, handlers) has settled. */
  async idle(): Promise<void> {
    while (this.tasks.size > 0) {
      await Promise.allSettled([...this.tasks]);
    }
  }

  // ------------------------------------------------------------------
  // startup

  async init(): Promise<void> {
    await this.track(
      (async () => {
        try {
          const [health, models] = [await this.client.health(), await this.client.models()];
          this.el('health').textContent = `service: ${health.status}`;
          const select = this.el<HTMLSelectElement>('alpha-select');
          select.innerHTML = '';
          for (const alpha of models.alphas) {
            const option = document.createElement('option');
            option.value = String(alpha);
            option.textContent = String(alpha);
            select.appendChild(option);
          }
          this.alpha = models.alphas[models.alphas.length - 1] ?? 1;
          select.value = String(this.alpha);
          select.addEventListener('change', () => {
            this.alpha = Number(select.value);
          });
        } catch (err) {
          this.showError(err, () => this.track(this.init()));
        }
      })(),
    );
  }

  // ------------------------------------------------------------------
  // draft side

  getDraft(): CurveDraft {
    return this.editor.getDraft();
  }

  setRampPreset(dMax = 20, fMax = 100): void {
    this.editor.setDraft(rampDraft(dMax, fMax));
  }

  private onDraftChange(): void {
    const draft = this.editor.getDraft();
    const empty = draft.points.length === 0;
    this.el('empty-state').hidden = !empty;
    this.el<HTMLButtonElement>('invert-btn').disabled = !isSubmittable(draft);

    const threshold = Number(this.el<HTMLInputElement>('threshold-input').value) || 10;
    const energy = Number(this.el<HTMLInputElement>('energy-input').value) || 0;
    if (isSubmittable(draft)) {
      const arrays = toCurveArrays(draft);
      const grid = resampleToGrid(arrays.displacements, arrays.forces);
      const work = workJ(grid.displacements, grid.forces);
      const ef = energyBeforeThresholdJ(grid.displacements, grid.forces, threshold);
      this.el('target-work').textContent = work.toPrecision(6);
      this.el('target-peak').textContent = peakForceN(grid.forces).toPrecision(6);
      this.el('target-ef').textContent = ef.toPrecision(6);
      const badge = this.el('impact-badge');
      if (energy > 0) {
        badge.textContent = ef >= energy ? 'meets target energy' : `short by ${(energy - ef).toPrecision(3)} J`;
        badge.className = ef >= energy ? 'pass' : 'fail';
      } else {
        badge.textContent = '';
      }
    } else {
      for (const id of ['target-work', 'target-peak', 'target-ef']) this.el(id).textContent = '–';
      this.el('impact-badge').textContent = '';
    }
    this.redrawPlot();
  }

  private redrawPlot(): void {
    const threshold = Number(this.el<HTMLInputElement>('threshold-input').value);
    this.plot.draw({
      target: this.editor.getDraft().points,
      predicted: this.predicted ?? undefined,
      thresholdN: threshold > 0 ? threshold : undefined,
    });
  }

  // ------------------------------------------------------------------
  // inverse flow

  private async runInverse(): Promise<void> {
    const draft = this.editor.getDraft();
    if (!isSubmittable(draft)) return;
    try {
      const result = await this.client.inverse(toCurveArrays(draft), this.alpha);
      this.applyDesign(result.design);
      this.predicted = result.predicted_curve;
      this.setBadges(result.printability);
      this.redrawPlot();

      // Cross-check: our resampled-target work plus the server's delta
      // must equal our work integral of the returned predicted curve.
      const arrays = toCurveArrays(draft);
      const grid = resampleToGrid(arrays.displacements, arrays.forces);
      const predictedWork = workJ(result.predicted_curve.displacements, result.predicted_curve.forces);
      const serverPredictedWork = workJ(grid.displacements, grid.forces) + result.metrics_delta.work_j;
      this.reportCrossCheck(relativeError(predictedWork, serverPredictedWork));

      this.el('m-stiffness').textContent = '–';
      this.el('m-work').textContent = predictedWork.toPrecision(6);
      this.el('m-maxdisp').textContent = (
        result.predicted_curve.displacements[result.predicted_curve.displacements.length - 1] ?? 0
      ).toPrecision(6);

      await this.refreshPreview();
    } catch (err) {
      if (!isAbort(err)) this.showError(err, () => this.track(this.runInverse()));
    }
  }

  private async refreshPreview(): Promise<void> {
    if (!this.design) return;
    try {
      const bytes = await this.client.mesh(this.design);
      this.viewer.showStl(bytes);
    } catch (err) {
      if (!isAbort(err)) this.showError(err, () => this.track(this.refreshPreview()));
    }
  }

  hasPreview(): boolean {
    return this.viewer.hasMesh();
  }

  // ------------------------------------------------------------------
  // design panel and what-if flow

  getDesign(): Design | null {
    return this.design ? { ...this.design } : null;
  }

  private buildSliders(): void {
    const container = this.el('sliders');
    for (const spec of SLIDERS) {
      const row = document.createElement('label');
      row.className = 'slider-row';
      const text = document.createElement('span');
      text.textContent = `${spec.label}${spec.unit ? ` (${spec.unit})` : ''}`;
      const input = document.createElement('input');
      input.type = 'range';
      input.min = String(spec.min);
      input.max = String(spec.max);
      input.step = String(spec.step);
      input.dataset.field = spec.field;
      input.addEventListener('input', () => {
        if (!this.design) return;
        this.design = { ...this.design, [spec.field]: clampField(spec.field, Number(input.value)) };
        this.renderDesignTable();
        this.whatIfDebounced();
      });
      row.append(text, input);
      container.appendChild(row);
    }
    const material = this.el<HTMLSelectElement>('material-select');
    for (const m of MATERIALS) {
      const option = document.createElement('option');
      option.value = m;
      option.textContent = m;
      material.appendChild(option);
    }
    material.addEventListener('change', () => {
      if (!this.design) return;
      this.design = { ...this.design, material: material.value as Material };
      this.renderDesignTable();
      this.whatIfDebounced();
    });
  }

  private applyDesign(design: Design): void {
    this.design = { ...design };
    for (const spec of SLIDERS) {
      const input = this.root.querySelector<HTMLInputElement>(`#sliders input[data-field="${spec.field}"]`);
      if (input) input.value = String(design[spec.field]);
    }
    this.el<HTMLSelectElement>('material-select').value = design.material;
    this.el<HTMLButtonElement>('mesh-btn').disabled = false;
    this.renderDesignTable();
  }

  private renderDesignTable(): void {
    const body = this.el('design-table').querySelector('tbody')!;
    body.innerHTML = '';
    if (!this.design) return;
    for (const [key, value] of Object.entries(this.design)) {
      const row = document.createElement('tr');
      const name = document.createElement('td');
      name.textContent = key;
      const val = document.createElement('td');
      val.textContent = typeof value === 'number' ? value.toPrecision(5) : String(value);
      row.append(name, val);
      body.appendChild(row);
    }
  }

  private async runWhatIf(): Promise<void> {
    if (!this.design) return;
    const design = { ...this.design };
    try {
      const result = await this.client.forward(design);
      this.predicted = result.curve;
      this.redrawPlot();
      this.showMetrics(result.metrics);
      this.reportCrossCheck(
        relativeError(workJ(result.curve.displacements, result.curve.forces), result.metrics.work_j),
      );
      this.whatIfCount += 1;
      this.history.push({
        design,
        curve: result.curve,
        metrics: result.metrics,
        label: `#${this.whatIfCount} ${design.mass.toPrecision(3)} g ${design.material}`,
      });
      this.renderHistory();
    } catch (err) {
      if (!isAbort(err)) this.showError(err, () => this.track(this.runWhatIf()));
    }
  }

  private showMetrics(metrics: Metrics): void {
    this.el('m-stiffness').textContent = metrics.stiffness_n_mm.toPrecision(6);
    this.el('m-work').textContent = metrics.work_j.toPrecision(6);
    this.el('m-maxdisp').textContent = metrics.max_displacement_mm.toPrecision(6);
  }

  private setBadges(report: Printability): void {
    const perimeter = this.el('badge-perimeter');
    perimeter.textContent = report.passes_perimeter
      ? `base perimeter ${report.base_perimeter_mm.toFixed(1)} mm`
      : `base perimeter ${report.base_perimeter_mm.toFixed(1)} mm < 30 mm`;
    perimeter.className = `badge ${report.passes_perimeter ? 'pass' : 'fail'}`;
    const axis = this.el('badge-axis');
    axis.textContent = report.passes_axis ? 'clears center axis' : 'wall crosses center axis';
    axis.className = `badge ${report.passes_axis ? 'pass' : 'fail'}`;
  }

  private reportCrossCheck(relErr: number): void {
    const node = this.el('crosscheck');
    const ok = relErr < CROSSCHECK_TOLERANCE;
    node.textContent = ok
      ? `work cross-check ok (${relErr.toExponential(2)})`
      : `work cross-check FAILED (${relErr.toExponential(2)})`;
    node.className = ok ? 'pass' : 'fail';
  }

  // ------------------------------------------------------------------
  // history

  getHistory(): History {
    return this.history;
  }

  private renderHistory(): void {
    const strip = this.el('history-strip');
    strip.innerHTML = '';
    this.history.list().forEach((entry, index) => {
      const button = document.createElement('button');
      button.className = 'history-entry';
      button.textContent = entry.label;
      button.addEventListener('click', () => this.restoreHistory(index));
      strip.appendChild(button);
    });
  }

  restoreHistory(index: number): void {
    const entry = this.history.get(index);
    this.applyDesign(entry.design);
    this.predicted = entry.curve;
    this.showMetrics(entry.metrics);
    this.redrawPlot();
  }

  // ------------------------------------------------------------------
  // state export / import

  exportStateString(): string {
    return exportState(this.editor.getDraft(), this.alpha, this.history);
  }

  importStateString(text: string): void {
    const { draft, alpha, history } = importState(text);
    this.alpha = alpha;
    const select = this.el<HTMLSelectElement>('alpha-select');
    if (select.querySelector(`option[value="${alpha}"]`)) select.value = String(alpha);
    this.history.clear();
    for (const entry of history.list()) this.history.push(entry);
    this.renderHistory();
    this.editor.setDraft(draft);
  }

  private wireToolbar(): void {
    this.el('ramp-preset').addEventListener('click', () => this.setRampPreset());
    this.el('clear-draft').addEventListener('click', () => this.editor.clear());
    this.el('export-btn').addEventListener('click', () => {
      this.el<HTMLTextAreaElement>('state-io').value = this.exportStateString();
    });
    this.el('import-btn').addEventListener('click', () => {
      try {
        this.importStateString(this.el<HTMLTextAreaElement>('state-io').value);
        this.hideError();
      } catch (err) {
        this.showError(err, null);
      }
    });
  }

  // ------------------------------------------------------------------
  // errors

  private showError(err: unknown, retry: (() => void) | null): void {
    const banner = this.el('error-banner');
    let message = err instanceof Error ? err.message : String(err);
    if (err instanceof ApiError && err.availableAlphas) {
      message += ` (available: ${err.availableAlphas.join(', ')})`;
    }
    this.el('error-text').textContent = message;
    banner.hidden = false;
    this.lastFailed = retry;
    this.el<HTMLButtonElement>('retry-btn').hidden = retry === null;
  }

  private hideError(): void {
    this.el('error-banner').hidden = true;
    this.el('error-text').textContent = '';
  }

  errorText(): string {
    return this.el('error-banner').hidden ? '' : (this.el('error-text').textContent ?? '');
  }
}

export function createApp(root: HTMLElement, client: ApiClient, options?: AppOptions): App {
  return new App(root, client, options);
}
