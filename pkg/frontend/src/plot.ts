// Canvas plot of target vs predicted force-displacement curves, with
// optional force-threshold overlay for impact-mode reading.

import type { ControlPoint, CurveArrays } from './types';

export interface PlotData {
  target?: ControlPoint[];
  predicted?: CurveArrays;
  thresholdN?: number;
}

/** Plot-area inset shared with the editor's coordinate mapping. */
export const MARGIN = 34;

export class CurvePlot {
  private readonly canvas: HTMLCanvasElement;

  constructor(canvas: HTMLCanvasElement) {
    this.canvas = canvas;
  }

  draw(data: PlotData): void {
    const ctx = this.canvas.getContext('2d');
    if (!ctx) return; // headless test environment
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);

    let dMax = 1;
    let fMax = 1;
    for (const p of data.target ?? []) {
      dMax = Math.max(dMax, p.d);
      fMax = Math.max(fMax, p.f);
    }
    if (data.predicted) {
      for (const d of data.predicted.displacements) dMax = Math.max(dMax, d);
      for (const f of data.predicted.forces) fMax = Math.max(fMax, f);
    }
    if (data.thresholdN !== undefined) fMax = Math.max(fMax, data.thresholdN);
    fMax *= 1.08;

    const sx = (d: number) => MARGIN + (d / dMax) * (width - 2 * MARGIN);
    const sy = (f: number) => height - MARGIN - (f / fMax) * (height - 2 * MARGIN);

    ctx.strokeStyle = '#99a';
    ctx.lineWidth = 1;
    ctx.strokeRect(MARGIN, MARGIN, width - 2 * MARGIN, height - 2 * MARGIN);
    ctx.fillStyle = '#667';
    ctx.font = '11px sans-serif';
    ctx.fillText(`${dMax.toFixed(1)} mm`, width - MARGIN - 40, height - MARGIN + 14);
    ctx.fillText(`${(fMax / 1.08).toFixed(1)} N`, 2, MARGIN + 4);

    if (data.thresholdN !== undefined) {
      ctx.strokeStyle = '#c33';
      ctx.setLineDash([6, 4]);
      ctx.beginPath();
      ctx.moveTo(MARGIN, sy(data.thresholdN));
      ctx.lineTo(width - MARGIN, sy(data.thresholdN));
      ctx.stroke();
      ctx.setLineDash([]);
    }

    if (data.predicted && data.predicted.displacements.length > 1) {
      ctx.strokeStyle = '#d80';
      ctx.lineWidth = 2;
      ctx.beginPath();
      data.predicted.displacements.forEach((d, i) => {
        const x = sx(d);
        const y = sy(data.predicted!.forces[i]!);
        if (i === 0) ctx.moveTo(x, y);
        else ctx.lineTo(x, y);
      });
      ctx.stroke();
    }

    const target = data.target ?? [];
    if (target.length > 0) {
      ctx.strokeStyle = '#36c';
      ctx.lineWidth = 2;
      ctx.beginPath();
      target.forEach((p, i) => {
        if (i === 0) ctx.moveTo(sx(p.d), sy(p.f));
        else ctx.lineTo(sx(p.d), sy(p.f));
      });
      ctx.stroke();
      ctx.fillStyle = '#36c';
      for (const p of target) {
        ctx.beginPath();
        ctx.arc(sx(p.d), sy(p.f), 4, 0, 2 * Math.PI);
        ctx.fill();
      }
    }
  }

  /** Map a mouse event to curve coordinates; used by the editor. */
  toCurveCoords(x: number, y: number, dMax: number, fMax: number): ControlPoint {
    const { width, height } = this.canvas;
    return {
      d: ((x - MARGIN) / (width - 2 * MARGIN)) * dMax,
      f: ((height - MARGIN - y) / (height - 2 * MARGIN)) * fMax,
    };
  }
}
