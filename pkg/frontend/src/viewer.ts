// Minimal software STL viewer: flat-shaded painter's algorithm on a 2D
// canvas, rotated by pointer drag. No client-side geometry is ever
// generated; the mesh is exactly the server's STL bytes.

import { parseStl, projectMesh } from './stl';
import type { StlMesh } from './stl';

export class MeshViewer {
  private readonly canvas: HTMLCanvasElement;
  private mesh: StlMesh | null = null;
  private yaw = 0.7;
  private pitch = -0.9;
  private dragging = false;
  private lastX = 0;
  private lastY = 0;

  constructor(canvas: HTMLCanvasElement) {
    this.canvas = canvas;
    canvas.addEventListener('pointerdown', (e) => {
      this.dragging = true;
      this.lastX = e.clientX;
      this.lastY = e.clientY;
    });
    canvas.addEventListener('pointermove', (e) => {
      if (!this.dragging) return;
      this.yaw += (e.clientX - this.lastX) * 0.01;
      this.pitch += (e.clientY - this.lastY) * 0.01;
      this.lastX = e.clientX;
      this.lastY = e.clientY;
      this.render();
    });
    canvas.addEventListener('pointerup', () => {
      this.dragging = false;
    });
    canvas.addEventListener('pointerleave', () => {
      this.dragging = false;
    });
  }

  /** Parse and display server STL bytes; returns the triangle count. */
  showStl(data: ArrayBuffer): number {
    this.mesh = parseStl(data);
    this.render();
    return this.mesh.triangleCount;
  }

  hasMesh(): boolean {
    return this.mesh !== null;
  }

  clear(): void {
    this.mesh = null;
    this.render();
  }

  private render(): void {
    const ctx = this.canvas.getContext('2d');
    if (!ctx) return; // headless test environment
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    if (!this.mesh) return;
    for (const tri of projectMesh(this.mesh, this.yaw, this.pitch, width, height)) {
      const level = Math.round(90 + tri.shade * 140);
      ctx.fillStyle = `rgb(${level - 30}, ${level - 10}, ${level})`;
      ctx.beginPath();
      ctx.moveTo(tri.points[0], tri.points[1]);
      ctx.lineTo(tri.points[2], tri.points[3]);
      ctx.lineTo(tri.points[4], tri.points[5]);
      ctx.closePath();
      ctx.fill();
    }
  }
}
