import { ApiError } from '../api.js';
import type { RenderContext } from '../app.js';
import { el } from '../dom.js';
import { label } from '../labels.js';
import type { ListingItem } from '../types.js';
import { encodeViewState, type SortKey, type ViewState } from '../viewstate.js';

const PAGE_SIZE = 20;

function isAbort(err: unknown): boolean {
  return err instanceof DOMException && err.name === 'AbortError';
}

function thumb(ctx: RenderContext, item: ListingItem): HTMLElement {
  if (item.thumbnail) {
    return el('img', {
      class: 'card-thumb',
      src: ctx.client.imageUrl(item.thumbnail),
      alt: '',
      loading: 'lazy',
    });
  }
  return el('div', { class: 'card-thumb card-thumb-empty' }, item.title.slice(0, 1) || '?');
}

function card(ctx: RenderContext, item: ListingItem): HTMLElement {
  const target: ViewState = { ...ctx.state, view: 'dataset', dataset: item.id };
  return el('li', { class: 'dataset-card' },
    el('a', {
      class: 'card-link',
      href: encodeViewState(target),
      'data-dataset-id': item.id,
      onclick: (event: Event) => {
        event.preventDefault();
        ctx.navigate({ ...ctx.state, view: 'dataset', dataset: item.id });
      },
    },
      thumb(ctx, item),
      el('h3', { class: 'card-title' }, item.title),
      el('p', { class: 'card-snippet' }, item.snippet),
      el('p', { class: 'card-meta' },
        el('span', { class: 'card-kind' }, item.data_kind.replace('_', ' ')),
        ' · ',
        el('span', { class: 'card-access' }, label(ctx.state.lang, 'accessCount')(item.access_count)),
      ),
    ),
  );
}

export async function renderCatalog(main: HTMLElement, ctx: RenderContext): Promise<void> {
  const { state } = ctx;
  const section = el('section', { class: 'catalog-view' });
  main.append(section);

  // Controls render before the data comes back so the search box is
  // usable even while a slow page loads.
  const input = el('input', {
    type: 'search',
    class: 'search-input',
    value: state.q,
    placeholder: label(state.lang, 'searchPlaceholder'),
  });
  const form = el('form', {
    class: 'search-bar',
    onsubmit: (event: Event) => {
      event.preventDefault();
      ctx.navigate({ ...ctx.state, q: input.value.trim(), page: 1 });
    },
  }, input, el('button', { type: 'submit' }, label(state.lang, 'searchButton')));

  const filterRow = el('div', { class: 'filter-row' });
  const resultArea = el('div', { class: 'result-area' });
  section.append(form, filterRow, resultArea);

  let config;
  try {
    config = await ctx.getConfig();
  } catch (err) {
    if (isAbort(err) || ctx.signal.aborted) return;
    showError(resultArea, ctx);
    return;
  }
  if (ctx.signal.aborted) return;

  for (const chip of config.chips) {
    const active = ctx.state.chips.includes(chip);
    filterRow.append(
      el('button', {
        type: 'button',
        class: active ? 'chip is-active' : 'chip',
        'data-chip': chip,
        'aria-pressed': active ? 'true' : 'false',
        onclick: () => {
          const current = ctx.state.chips;
          const next = current.includes(chip)
            ? current.filter((c) => c !== chip)
            : [...current, chip];
          ctx.navigate({ ...ctx.state, chips: next, page: 1 });
        },
      }, chip),
    );
  }

  filterRow.append(
    el('button', {
      type: 'button',
      class: 'combine-toggle',
      title: 'Match all terms (AND) or any term (OR)',
      onclick: () => {
        const flipped = ctx.state.combine === 'AND' ? 'OR' : 'AND';
        ctx.navigate({ ...ctx.state, combine: flipped, page: 1 });
      },
    }, ctx.state.combine),
  );

  const sortSelect = el('select', {
    class: 'sort-select',
    'aria-label': label(state.lang, 'sortLabel'),
    onchange: () => {
      const sort = sortSelect.value as SortKey;
      // A fresh sort order invalidates the shuffle seed.
      ctx.navigate({ ...ctx.state, sort, seed: null, page: 1 });
    },
  },
    el('option', { value: 'random' }, label(state.lang, 'sortRandom')),
    el('option', { value: 'access_desc' }, label(state.lang, 'sortAccess')),
    el('option', { value: 'title_asc' }, label(state.lang, 'sortTitle')),
  );
  sortSelect.value = state.sort;
  filterRow.append(sortSelect);

  let page;
  try {
    page = await ctx.client.searchDatasets({
      q: state.q,
      chips: state.chips,
      combine: state.combine,
      sort: state.sort,
      seed: state.seed,
      page: state.page,
      pageSize: PAGE_SIZE,
      lang: state.lang,
    }, ctx.signal);
  } catch (err) {
    if (isAbort(err) || ctx.signal.aborted) return;
    if (!(err instanceof ApiError)) console.error('search failed:', err);
    showError(resultArea, ctx);
    return;
  }
  if (ctx.signal.aborted) return;

  // First random-sorted visit: the server draws the seed. Pin it in the
  // URL so pagination, reloads, and shared links keep this ordering.
  if (state.sort === 'random' && state.seed === null && page.seed !== null) {
    ctx.replaceUrl({ ...ctx.state, seed: page.seed });
  }

  if (page.total === 0) {
    resultArea.append(
      el('div', { class: 'empty-state' },
        el('p', {}, label(state.lang, 'noResults')),
        el('p', { class: 'hint' }, label(state.lang, 'noResultsHint')),
      ),
    );
    return;
  }

  resultArea.append(
    el('p', { class: 'result-count' }, label(state.lang, 'resultCount')(page.total)),
    el('ul', { class: 'card-grid' }, ...page.items.map((item) => card(ctx, item))),
  );

  const pageCount = Math.max(1, Math.ceil(page.total / page.page_size));
  if (pageCount > 1) {
    resultArea.append(
      el('nav', { class: 'pager' },
        el('button', {
          type: 'button',
          disabled: state.page <= 1,
          onclick: () => ctx.navigate({ ...ctx.state, page: ctx.state.page - 1 }),
        }, label(state.lang, 'prevPage')),
        el('span', { class: 'pager-label' }, label(state.lang, 'pageOf')(state.page, pageCount)),
        el('button', {
          type: 'button',
          disabled: state.page >= pageCount,
          onclick: () => ctx.navigate({ ...ctx.state, page: ctx.state.page + 1 }),
        }, label(state.lang, 'nextPage')),
      ),
    );
  }
}

function showError(container: HTMLElement, ctx: RenderContext): void {
  container.append(
    el('div', { class: 'error-banner', role: 'alert' },
      el('p', {}, label(ctx.state.lang, 'loadFailed')),
      el('button', { type: 'button', onclick: () => ctx.rerender() }, label(ctx.state.lang, 'retry')),
    ),
  );
}
