export interface LayoutNode {
  id: string;
  radius: number;
  x: number;
  y: number;
  vx: number;
  vy: number;
}

export interface LayoutEdge {
  a: number;
  b: number;
  weight: number;
}

export interface LayoutOptions {
  width: number;
  height: number;
  iterations?: number;
  seed?: number;
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/**
 * Plain spring-embedder. Runs a fixed number of synchronous steps and
 * leaves final positions on the nodes; no animation loop, the graph is
 * small enough to settle in one go. Seeded so the same document always
 * lays out the same way.
 */
export function runLayout(nodes: LayoutNode[], edges: LayoutEdge[], opts: LayoutOptions): void {
  const { width, height } = opts;
  const iterations = opts.iterations ?? 220;
  const rand = mulberry32(opts.seed ?? 42);

  // Start on a jittered ring so symmetric graphs do not collapse.
  const cx = width / 2;
  const cy = height / 2;
  const ring = Math.min(width, height) * 0.32;
  nodes.forEach((node, i) => {
    const angle = (2 * Math.PI * i) / Math.max(1, nodes.length) + rand() * 0.5;
    node.x = cx + ring * Math.cos(angle) + (rand() - 0.5) * 10;
    node.y = cy + ring * Math.sin(angle) + (rand() - 0.5) * 10;
    node.vx = 0;
    node.vy = 0;
  });
  if (nodes.length <= 1) return;

  const area = width * height;
  const k = Math.sqrt(area / nodes.length) * 0.7;
  const maxWeight = edges.reduce((m, e) => Math.max(m, e.weight), 1);

  for (let step = 0; step < iterations; step++) {
    const temperature = 0.1 * Math.min(width, height) * (1 - step / iterations) + 1;

    for (let i = 0; i < nodes.length; i++) {
      for (let j = i + 1; j < nodes.length; j++) {
        const a = nodes[i];
        const b = nodes[j];
        let dx = a.x - b.x;
        let dy = a.y - b.y;
        let dist = Math.hypot(dx, dy);
        if (dist < 0.01) {
          dx = rand() - 0.5;
          dy = rand() - 0.5;
          dist = Math.hypot(dx, dy);
        }
        const minGap = a.radius + b.radius + 6;
        const repulse = (k * k) / dist + (dist < minGap ? (minGap - dist) * 2 : 0);
        const fx = (dx / dist) * repulse;
        const fy = (dy / dist) * repulse;
        a.vx += fx;
        a.vy += fy;
        b.vx -= fx;
        b.vy -= fy;
      }
    }

    for (const edge of edges) {
      const a = nodes[edge.a];
      const b = nodes[edge.b];
      const dx = a.x - b.x;
      const dy = a.y - b.y;
      const dist = Math.max(0.01, Math.hypot(dx, dy));
      // Heavier co-occurrence pulls slightly tighter.
      const pull = ((dist * dist) / k) * (0.5 + (0.5 * edge.weight) / maxWeight) * 0.01;
      const fx = (dx / dist) * pull;
      const fy = (dy / dist) * pull;
      a.vx -= fx;
      a.vy -= fy;
      b.vx += fx;
      b.vy += fy;
    }

    for (const node of nodes) {
      node.vx += (cx - node.x) * 0.01;
      node.vy += (cy - node.y) * 0.01;
      const speed = Math.hypot(node.vx, node.vy);
      const cap = Math.min(speed, temperature);
      if (speed > 0.01) {
        node.x += (node.vx / speed) * cap;
        node.y += (node.vy / speed) * cap;
      }
      node.vx = 0;
      node.vy = 0;
      const pad = node.radius + 4;
      node.x = Math.min(width - pad, Math.max(pad, node.x));
      node.y = Math.min(height - pad, Math.max(pad, node.y));
    }
  }
}
