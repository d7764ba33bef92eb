// Binary STL parsing and a small software projection pipeline for the
// shell preview. The mesh always comes from the server's STL bytes, so
// what the viewer shows is exactly what would be fabricated.

export interface StlMesh {
  triangleCount: number;
  /** x,y,z per vertex, 9 floats per triangle. */
  positions: Float32Array;
  /** one normal per triangle. */
  normals: Float32Array;
}

const HEADER_BYTES = 80;
const TRIANGLE_BYTES = 50;

export function parseStl(data: ArrayBuffer): StlMesh {
  if (data.byteLength < HEADER_BYTES + 4) {
    throw new Error(`not a binary STL: ${data.byteLength} bytes`);
  }
  const view = new DataView(data);
  const count = view.getUint32(HEADER_BYTES, true);
  const expected = HEADER_BYTES + 4 + count * TRIANGLE_BYTES;
  if (data.byteLength !== expected) {
    throw new Error(`binary STL length mismatch: ${data.byteLength} bytes for ${count} triangles`);
  }
  const positions = new Float32Array(count * 9);
  const normals = new Float32Array(count * 3);
  let offset = HEADER_BYTES + 4;
  for (let t = 0; t < count; t++) {
    for (let k = 0; k < 3; k++) normals[t * 3 + k] = view.getFloat32(offset + 4 * k, true);
    for (let v = 0; v < 9; v++) positions[t * 9 + v] = view.getFloat32(offset + 12 + 4 * v, true);
    offset += TRIANGLE_BYTES;
  }
  return { triangleCount: count, positions, normals };
}

export interface ProjectedTriangle {
  /** screen-space x,y for the three vertices */
  points: [number, number, number, number, number, number];
  /** mean view-space depth, used for painter's sorting */
  depth: number;
  /** 0..1 diffuse intensity from the rotated normal */
  shade: number;
}

/**
 * Rotate around y (yaw) then x (pitch), orthographically project onto
 * the canvas, and return triangles sorted back-to-front.
 */
export function projectMesh(
  mesh: StlMesh,
  yaw: number,
  pitch: number,
  width: number,
  height: number,
): ProjectedTriangle[] {
  const cy = Math.cos(yaw);
  const sy = Math.sin(yaw);
  const cx = Math.cos(pitch);
  const sx = Math.sin(pitch);

  // Bounding box -> scale/center so the shell fills ~80% of the canvas.
  let min = [Infinity, Infinity, Infinity];
  let max = [-Infinity, -Infinity, -Infinity];
  for (let i = 0; i < mesh.positions.length; i += 3) {
    for (let k = 0; k < 3; k++) {
      const v = mesh.positions[i + k]!;
      min[k] = Math.min(min[k]!, v);
      max[k] = Math.max(max[k]!, v);
    }
  }
  const center = [0, 1, 2].map((k) => (min[k]! + max[k]!) / 2);
  const size = Math.max(max[0]! - min[0]!, max[1]! - min[1]!, max[2]! - min[2]!) || 1;
  const scale = (0.8 * Math.min(width, height)) / size;

  const rotate = (x: number, y: number, z: number): [number, number, number] => {
    // yaw about the vertical (z-up model axis), then pitch toward the viewer
    const x1 = cy * x + sy * y;
    const y1 = -sy * x + cy * y;
    const z1 = z;
    const y2 = cx * y1 - sx * z1;
    const z2 = sx * y1 + cx * z1;
    return [x1, y2, z2];
  };

  const light = [0.0, -0.6, 0.8] as const; // toward the viewer, slightly from above
  const out: ProjectedTriangle[] = [];
  for (let t = 0; t < mesh.triangleCount; t++) {
    const pts: number[] = [];
    let depth = 0;
    for (let v = 0; v < 3; v++) {
      const i = t * 9 + v * 3;
      const [x, y, z] = rotate(
        mesh.positions[i]! - center[0]!,
        mesh.positions[i + 1]! - center[1]!,
        mesh.positions[i + 2]! - center[2]!,
      );
      pts.push(width / 2 + x * scale, height / 2 - z * scale);
      depth += y;
    }
    const [nx, ny, nz] = rotate(mesh.normals[t * 3]!, mesh.normals[t * 3 + 1]!, mesh.normals[t * 3 + 2]!);
    const dot = nx * light[0] + ny * light[1] + nz * light[2];
    out.push({
      points: pts as ProjectedTriangle['points'],
      depth: depth / 3,
      shade: 0.25 + 0.75 * Math.max(0, Math.abs(dot)),
    });
  }
  out.sort((a, b) => b.depth - a.depth);
  return out;
}
