/** Deterministic force-directed layout.
 *
 * Initial positions are seeded from a hash of each unit id, so the same
 * graph always lays out identically (reproducible screenshots); a fixed
 * number of spring/repulsion iterations then relaxes the picture. Dragging
 * in the app overrides positions client-side only.
 */

export interface Point {
  x: number;
  y: number;
}

export function hashString(value: string): number {
  // FNV-1a, 32 bit
  let hash = 0x811c9dc5;
  for (let i = 0; i < value.length; i++) {
    hash ^= value.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193);
  }
  return hash >>> 0;
}

export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function computeLayout(
  nodeIds: string[],
  edges: Array<{ from: string; to: string }>,
  width: number,
  height: number,
  iterations = 120,
): Map<string, Point> {
  const positions = new Map<string, Point>();
  for (const id of nodeIds) {
    const rand = mulberry32(hashString(id));
    positions.set(id, {
      x: width * (0.15 + 0.7 * rand()),
      y: height * (0.15 + 0.7 * rand()),
    });
  }
  if (nodeIds.length < 2) {
    return positions;
  }

  const index = new Map(nodeIds.map((id, i) => [id, i]));
  const springs = edges
    .filter((e) => index.has(e.from) && index.has(e.to) && e.from !== e.to)
    .map((e) => [e.from, e.to] as const);

  const area = width * height;
  const k = Math.sqrt(area / nodeIds.length) * 0.6;

  for (let step = 0; step < iterations; step++) {
    const cooling = 1 - step / iterations;
    const force = new Map<string, Point>(nodeIds.map((id) => [id, { x: 0, y: 0 }]));

    for (let i = 0; i < nodeIds.length; i++) {
      for (let j = i + 1; j < nodeIds.length; j++) {
        const a = positions.get(nodeIds[i])!;
        const b = positions.get(nodeIds[j])!;
        let dx = a.x - b.x;
        let dy = a.y - b.y;
        let dist = Math.hypot(dx, dy);
        if (dist < 1e-3) {
          // identical seeds would lock nodes together; nudge deterministically
          dx = ((hashString(nodeIds[i]) % 7) - 3) || 1;
          dy = ((hashString(nodeIds[j]) % 7) - 3) || -1;
          dist = Math.hypot(dx, dy);
        }
        const repulsion = (k * k) / dist;
        const fa = force.get(nodeIds[i])!;
        const fb = force.get(nodeIds[j])!;
        fa.x += (dx / dist) * repulsion;
        fa.y += (dy / dist) * repulsion;
        fb.x -= (dx / dist) * repulsion;
        fb.y -= (dy / dist) * repulsion;
      }
    }

    for (const [from, to] of springs) {
      const a = positions.get(from)!;
      const b = positions.get(to)!;
      const dx = a.x - b.x;
      const dy = a.y - b.y;
      const dist = Math.max(Math.hypot(dx, dy), 1e-3);
      const attraction = (dist * dist) / k;
      const fa = force.get(from)!;
      const fb = force.get(to)!;
      fa.x -= (dx / dist) * attraction;
      fa.y -= (dy / dist) * attraction;
      fb.x += (dx / dist) * attraction;
      fb.y += (dy / dist) * attraction;
    }

    const maxShift = 12 * cooling;
    for (const id of nodeIds) {
      const f = force.get(id)!;
      const p = positions.get(id)!;
      const magnitude = Math.max(Math.hypot(f.x, f.y), 1e-9);
      const shift = Math.min(magnitude, maxShift);
      p.x += (f.x / magnitude) * shift;
      p.y += (f.y / magnitude) * shift;
      p.x = Math.min(width - 30, Math.max(30, p.x));
      p.y = Math.min(height - 24, Math.max(24, p.y));
    }
  }

  for (const p of positions.values()) {
    p.x = Math.round(p.x * 100) / 100;
    p.y = Math.round(p.y * 100) / 100;
  }
  return positions;
}
