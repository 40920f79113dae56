import type { ApiClient } from './api.js';
import { clear, el } from './dom.js';
import { label } from './labels.js';
import type { ConfigInfo } from './types.js';
import { decodeViewState, encodeViewState, type ViewState } from './viewstate.js';
import { renderCatalog } from './views/catalog.js';
import { renderDataset } from './views/dataset.js';
import { renderNetwork } from './views/network.js';

export interface RenderContext {
  client: ApiClient;
  /** Live view of the app state; replaceUrl updates are visible here. */
  readonly state: ViewState;
  signal: AbortSignal;
  getConfig(): Promise<ConfigInfo>;
  /** Push the next state onto the history stack and re-render. */
  navigate(next: ViewState): void;
  /** Rewrite the current URL without a history entry or re-render. */
  replaceUrl(next: ViewState): void;
  /** Re-run the current view, e.g. from a retry button. */
  rerender(): void;
}

export interface AppOptions {
  client: ApiClient;
  window?: Window;
}

export interface App {
  current(): ViewState;
  navigate(next: ViewState): void;
  /** Resolves once no render pass is in flight. */
  whenIdle(): Promise<void>;
  destroy(): void;
}

/**
 * Wires the location hash to the three views. Every interaction funnels
 * through navigate(), which updates the hash; the hash is the single
 * source of truth, so back/forward and pasted links replay for free.
 */
export function mountApp(root: HTMLElement, options: AppOptions): App {
  const win = options.window ?? window;
  const client = options.client;

  let state = decodeViewState(win.location.hash);
  let renderedHash: string | null = null;
  let controller: AbortController | null = null;
  let pending: Promise<void> = Promise.resolve();
  let configPromise: Promise<ConfigInfo> | null = null;

  const main = el('main', { class: 'app-main' });
  const nav = el('header', { class: 'app-nav' });
  root.append(nav, main);

  function getConfig(): Promise<ConfigInfo> {
    if (!configPromise) {
      configPromise = client.config().catch((err) => {
        configPromise = null; // allow a retry to refetch
        throw err;
      });
    }
    return configPromise;
  }

  function navigate(next: ViewState): void {
    const hash = encodeViewState(next);
    if (win.location.hash !== hash) {
      // Assigning the hash pushes a history entry; the hashchange
      // listener dedupes because render() records the hash it handled.
      win.location.hash = hash;
    }
    render();
  }

  function replaceUrl(next: ViewState): void {
    const hash = encodeViewState(next);
    const base = win.location.pathname + win.location.search;
    win.history.replaceState(null, '', base + hash);
    renderedHash = hash;
    state = next;
    renderNav();
  }

  function renderNav(): void {
    clear(nav);
    const catalogState: ViewState = { ...state, view: 'catalog', dataset: null };
    const networkState: ViewState = { ...state, view: 'network', dataset: null };
    const link = (target: ViewState, text: string, active: boolean) =>
      el('a', {
        class: active ? 'nav-link is-active' : 'nav-link',
        href: encodeViewState(target),
        onclick: (event: Event) => {
          event.preventDefault();
          navigate(target);
        },
      }, text);

    const langButton = (lang: ViewState['lang'], text: string) =>
      el('button', {
        type: 'button',
        class: state.lang === lang ? 'lang-button is-active' : 'lang-button',
        onclick: () => {
          if (state.lang !== lang) navigate({ ...state, lang });
        },
      }, text);

    nav.append(
      el('span', { class: 'nav-brand' }, 'Research Data Catalog'),
      link(catalogState, label(state.lang, 'navCatalog'), state.view === 'catalog'),
      link(networkState, label(state.lang, 'navNetwork'), state.view === 'network'),
      el('span', { class: 'nav-spacer' }),
      langButton('en', 'EN'),
      langButton('ja', '日本語'),
    );
  }

  function render(): Promise<void> {
    renderedHash = win.location.hash || '#/';
    state = decodeViewState(win.location.hash);
    controller?.abort();
    controller = new AbortController();

    const ctx: RenderContext = {
      client,
      get state() {
        return state;
      },
      signal: controller.signal,
      getConfig,
      navigate,
      replaceUrl,
      rerender: () => void render(),
    };

    renderNav();
    clear(main);

    const view =
      state.view === 'dataset' ? renderDataset :
      state.view === 'network' ? renderNetwork :
      renderCatalog;

    pending = view(main, ctx).catch((err) => {
      if (ctx.signal.aborted) return;
      console.error('render failed:', err);
      clear(main);
      main.append(
        el('div', { class: 'error-banner' },
          el('p', {}, label(state.lang, 'loadFailed')),
          el('button', { type: 'button', onclick: () => void render() }, label(state.lang, 'retry')),
        ),
      );
    });
    return pending;
  }

  function onHashChange(): void {
    if ((win.location.hash || '#/') === renderedHash) return;
    render();
  }

  win.addEventListener('hashchange', onHashChange);
  render();

  return {
    current: () => state,
    navigate,
    async whenIdle() {
      let seen: Promise<void>;
      do {
        seen = pending;
        await seen;
      } while (seen !== pending);
    },
    destroy() {
      win.removeEventListener('hashchange', onHashChange);
      controller?.abort();
      clear(root as Element);
    },
  };
}
