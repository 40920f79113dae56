export type Lang = 'en' | 'ja';
export type Combine = 'AND' | 'OR';
export type SortKey = 'random' | 'access_desc' | 'title_asc';
export type ViewName = 'catalog' | 'dataset' | 'network';

/**
 * Everything the UI needs to rebuild a screen. The whole struct is
 * serializable into the location hash, so any state the user can reach
 * is also reachable through a pasted link, and the browser's history
 * stack replays it on back/forward.
 */
export interface ViewState {
  view: ViewName;
  lang: Lang;
  q: string;
  chips: string[];
  combine: Combine;
  sort: SortKey;
  /** Shuffle seed echoed by the server on the first random-sorted page. */
  seed: number | null;
  page: number;
  /** Dataset id when view is 'dataset'. */
  dataset: string | null;
  /** Inclusive download range, ISO dates. Either bound may be unset. */
  from: string | null;
  to: string | null;
}

export const SORT_KEYS: SortKey[] = ['random', 'access_desc', 'title_asc'];

export function defaultState(): ViewState {
  return {
    view: 'catalog',
    lang: 'en',
    q: '',
    chips: [],
    combine: 'AND',
    sort: 'random',
    seed: null,
    page: 1,
    dataset: null,
    from: null,
    to: null,
  };
}

// Fragment layout: #/ | #/network | #/datasets/<id>, followed by a query
// string. Defaults are omitted so plain links stay short.
export function encodeViewState(state: ViewState): string {
  let path = '/';
  if (state.view === 'network') {
    path = '/network';
  } else if (state.view === 'dataset' && state.dataset) {
    path = `/datasets/${encodeURIComponent(state.dataset)}`;
  }

  const params = new URLSearchParams();
  if (state.q) params.set('q', state.q);
  for (const chip of state.chips) params.append('chip', chip);
  if (state.combine !== 'AND') params.set('combine', state.combine);
  if (state.sort !== 'random') params.set('sort', state.sort);
  if (state.seed !== null) params.set('seed', String(state.seed));
  if (state.page > 1) params.set('page', String(state.page));
  if (state.lang !== 'en') params.set('lang', state.lang);
  if (state.from) params.set('from', state.from);
  if (state.to) params.set('to', state.to);

  const qs = params.toString();
  return qs ? `#${path}?${qs}` : `#${path}`;
}

/**
 * Parse a location hash back into a ViewState. Unknown routes and
 * malformed values fall back to defaults rather than throwing, so a
 * stale or hand-edited link still lands somewhere sensible.
 */
export function decodeViewState(hash: string): ViewState {
  const state = defaultState();
  let fragment = hash.startsWith('#') ? hash.slice(1) : hash;
  if (!fragment.startsWith('/')) fragment = '/' + fragment;

  const qIndex = fragment.indexOf('?');
  const path = qIndex === -1 ? fragment : fragment.slice(0, qIndex);
  const params = new URLSearchParams(qIndex === -1 ? '' : fragment.slice(qIndex + 1));

  const datasetMatch = /^\/datasets\/([^/]+)$/.exec(path);
  if (datasetMatch) {
    state.view = 'dataset';
    state.dataset = decodeURIComponent(datasetMatch[1]);
  } else if (path === '/network') {
    state.view = 'network';
  }

  state.q = params.get('q') ?? '';
  state.chips = params.getAll('chip');
  if (params.get('combine') === 'OR') state.combine = 'OR';
  const sort = params.get('sort');
  if (sort === 'access_desc' || sort === 'title_asc') state.sort = sort;
  if (params.get('lang') === 'ja') state.lang = 'ja';

  const seed = params.get('seed');
  if (seed !== null && /^\d+$/.test(seed)) {
    const n = Number(seed);
    if (Number.isSafeInteger(n)) state.seed = n;
  }
  const page = params.get('page');
  if (page !== null && /^\d+$/.test(page)) {
    const n = Number(page);
    if (n >= 1 && Number.isSafeInteger(n)) state.page = n;
  }
  state.from = params.get('from') || null;
  state.to = params.get('to') || null;
  return state;
}
