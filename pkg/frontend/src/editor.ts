// Mouse-driven control-point editing on the plot canvas: click to add,
// drag to move (with monotonicity snapping), double-click to remove.

import { addPoint, movePoint, removePoint } from './curve';
import type { CurveDraft } from './curve';
import { MARGIN } from './plot';

const EDIT_MARGIN = MARGIN;
const HIT_RADIUS_PX = 10;

export interface ViewScale {
  dMax: number;
  fMax: number;
}

export class CurveEditor {
  private readonly canvas: HTMLCanvasElement;
  private readonly onChange: (draft: CurveDraft) => void;
  private draft: CurveDraft = { points: [] };
  private view: ViewScale = { dMax: 25, fMax: 20 };
  private dragIndex = -1;

  constructor(canvas: HTMLCanvasElement, onChange: (draft: CurveDraft) => void) {
    this.canvas = canvas;
    this.onChange = onChange;
    canvas.addEventListener('mousedown', (e) => this.handleDown(e));
    canvas.addEventListener('mousemove', (e) => this.handleMove(e));
    canvas.addEventListener('mouseup', () => {
      this.dragIndex = -1;
    });
    canvas.addEventListener('mouseleave', () => {
      this.dragIndex = -1;
    });
    canvas.addEventListener('dblclick', (e) => this.handleRemove(e));
  }

  getDraft(): CurveDraft {
    return this.draft;
  }

  getView(): ViewScale {
    return { ...this.view };
  }

  /** Replace the draft and grow the view so everything stays on-canvas. */
  setDraft(draft: CurveDraft): void {
    this.draft = draft;
    for (const p of draft.points) {
      this.view.dMax = Math.max(this.view.dMax, p.d * 1.1);
      this.view.fMax = Math.max(this.view.fMax, p.f * 1.1);
    }
    this.onChange(this.draft);
  }

  clear(): void {
    this.setDraft({ points: [] });
  }

  private toCurve(e: MouseEvent): { d: number; f: number } {
    const rect = this.canvas.getBoundingClientRect();
    const x = e.clientX - rect.left;
    const y = e.clientY - rect.top;
    const w = this.canvas.width - 2 * EDIT_MARGIN;
    const h = this.canvas.height - 2 * EDIT_MARGIN;
    return {
      d: ((x - EDIT_MARGIN) / w) * this.view.dMax,
      f: ((this.canvas.height - EDIT_MARGIN - y) / h) * this.view.fMax,
    };
  }

  private toScreen(p: { d: number; f: number }): { x: number; y: number } {
    const w = this.canvas.width - 2 * EDIT_MARGIN;
    const h = this.canvas.height - 2 * EDIT_MARGIN;
    return {
      x: EDIT_MARGIN + (p.d / this.view.dMax) * w,
      y: this.canvas.height - EDIT_MARGIN - (p.f / this.view.fMax) * h,
    };
  }

  private hitTest(e: MouseEvent): number {
    const rect = this.canvas.getBoundingClientRect();
    const x = e.clientX - rect.left;
    const y = e.clientY - rect.top;
    for (let i = 0; i < this.draft.points.length; i++) {
      const s = this.toScreen(this.draft.points[i]!);
      if (Math.hypot(s.x - x, s.y - y) <= HIT_RADIUS_PX) return i;
    }
    return -1;
  }

  private handleDown(e: MouseEvent): void {
    const hit = this.hitTest(e);
    if (hit >= 0) {
      this.dragIndex = hit;
      return;
    }
    const p = this.toCurve(e);
    if (p.d < 0 || p.f < 0) return;
    this.draft = addPoint(this.draft, p);
    this.onChange(this.draft);
  }

  private handleMove(e: MouseEvent): void {
    if (this.dragIndex < 0) return;
    const p = this.toCurve(e);
    this.draft = movePoint(this.draft, this.dragIndex, p.d, p.f);
    this.onChange(this.draft);
  }

  private handleRemove(e: MouseEvent): void {
    const hit = this.hitTest(e);
    if (hit < 0) return;
    this.draft = removePoint(this.draft, hit);
    this.onChange(this.draft);
  }
}
