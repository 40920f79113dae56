import type { RenderContext } from '../app.js';
import { el, svgEl } from '../dom.js';
import { label } from '../labels.js';
import { runLayout, type LayoutEdge, type LayoutNode } from '../layout.js';
import { defaultState, type ViewState } from '../viewstate.js';

const WIDTH = 900;
const HEIGHT = 600;
const MAX_RADIUS = 28;

function isAbort(err: unknown): boolean {
  return err instanceof DOMException && err.name === 'AbortError';
}

/** Radius scales linearly with the term's occurrence rate. */
export function nodeRadius(rate: number, maxRate: number): number {
  if (maxRate <= 0) return MAX_RADIUS;
  return (rate / maxRate) * MAX_RADIUS;
}

export async function renderNetwork(main: HTMLElement, ctx: RenderContext): Promise<void> {
  const { state } = ctx;
  const section = el('section', { class: 'network-view' });
  main.append(section);

  let graph;
  try {
    graph = await ctx.client.network(ctx.signal);
  } catch (err) {
    if (isAbort(err) || ctx.signal.aborted) return;
    section.append(
      el('div', { class: 'error-banner', role: 'alert' },
        el('p', {}, label(state.lang, 'loadFailed')),
        el('button', { type: 'button', onclick: () => ctx.rerender() }, label(state.lang, 'retry')),
      ),
    );
    return;
  }
  if (ctx.signal.aborted) return;

  if (graph.nodes.length === 0) {
    section.append(el('div', { class: 'empty-state' }, el('p', {}, label(state.lang, 'networkEmpty'))));
    return;
  }

  section.append(el('p', { class: 'network-hint' }, label(state.lang, 'networkHint')));

  const maxRate = graph.nodes.reduce((m, n) => Math.max(m, n.rate), 0);
  const layoutNodes: LayoutNode[] = graph.nodes.map((node) => ({
    id: node.term,
    radius: nodeRadius(node.rate, maxRate),
    x: 0, y: 0, vx: 0, vy: 0,
  }));
  const indexByTerm = new Map(layoutNodes.map((n, i) => [n.id, i]));
  const layoutEdges: LayoutEdge[] = graph.edges
    .filter((e) => indexByTerm.has(e.term_a) && indexByTerm.has(e.term_b))
    .map((e) => ({
      a: indexByTerm.get(e.term_a)!,
      b: indexByTerm.get(e.term_b)!,
      weight: e.co_count,
    }));

  runLayout(layoutNodes, layoutEdges, { width: WIDTH, height: HEIGHT, seed: 7 });

  const svg = svgEl('svg', {
    class: 'network-svg',
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    width: '100%',
    role: 'img',
  });

  const maxCo = graph.edges.reduce((m, e) => Math.max(m, e.co_count), 1);
  for (const edge of layoutEdges) {
    const a = layoutNodes[edge.a];
    const b = layoutNodes[edge.b];
    svg.append(svgEl('line', {
      class: 'network-edge',
      x1: a.x.toFixed(1), y1: a.y.toFixed(1),
      x2: b.x.toFixed(1), y2: b.y.toFixed(1),
      'stroke-width': (1 + (2.5 * edge.weight) / maxCo).toFixed(2),
    }));
  }

  for (let i = 0; i < graph.nodes.length; i++) {
    const node = graph.nodes[i];
    const pos = layoutNodes[i];
    const group = svgEl('g', { class: 'network-node' });
    const circle = svgEl('circle', {
      class: 'node-dot',
      cx: pos.x.toFixed(1),
      cy: pos.y.toFixed(1),
      r: pos.radius.toFixed(2),
      'data-term': node.term,
    });
    circle.addEventListener('click', () => {
      // A term click turns into a plain catalog search for that term.
      const target: ViewState = { ...defaultState(), lang: ctx.state.lang, q: node.term };
      ctx.navigate(target);
    });
    const text = svgEl('text', {
      class: 'node-label',
      x: pos.x.toFixed(1),
      y: (pos.y + pos.radius + 12).toFixed(1),
      'text-anchor': 'middle',
    });
    text.textContent = node.term;
    group.append(circle, text);
    svg.append(group);
  }

  section.append(svg);
  section.append(el('p', { class: 'network-stats' },
    `${graph.nodes.length} terms / ${graph.edges.length} links / ${graph.total_titles} titles`));
}
