import { ApiError } from '../api.js';
import type { RenderContext } from '../app.js';
import { isoDate, monthGrid, monthLabel, shiftMonth } from '../calendar.js';
import { clear, el } from '../dom.js';
import { label } from '../labels.js';
import type { DatasetDoc } from '../types.js';
import { encodeViewState, type ViewState } from '../viewstate.js';

function isAbort(err: unknown): boolean {
  return err instanceof DOMException && err.name === 'AbortError';
}

function renderNotFound(main: HTMLElement, ctx: RenderContext): void {
  const back: ViewState = { ...ctx.state, view: 'catalog', dataset: null };
  main.append(
    el('section', { class: 'not-found' },
      el('h1', {}, label(ctx.state.lang, 'notFoundTitle')),
      el('p', {}, label(ctx.state.lang, 'notFoundBody')),
      el('a', {
        href: encodeViewState(back),
        onclick: (event: Event) => {
          event.preventDefault();
          ctx.navigate(back);
        },
      }, label(ctx.state.lang, 'backToCatalog')),
    ),
  );
}

/** Picks the month the calendar opens on. */
function initialMonth(ctx: RenderContext, doc: DatasetDoc): { year: number; month: number } {
  const anchor = ctx.state.from ?? doc.temporal_coverage?.[0];
  const parsed = anchor ? /^(\d{4})-(\d{2})/.exec(anchor) : null;
  if (parsed) return { year: Number(parsed[1]), month: Number(parsed[2]) };
  const now = new Date();
  return { year: now.getUTCFullYear(), month: now.getUTCMonth() + 1 };
}

export async function renderDataset(main: HTMLElement, ctx: RenderContext): Promise<void> {
  const { state } = ctx;
  const id = state.dataset;
  if (!id) {
    ctx.navigate({ ...state, view: 'catalog', dataset: null });
    return;
  }

  let doc: DatasetDoc;
  try {
    doc = await ctx.client.getDataset(id, state.lang, ctx.signal);
  } catch (err) {
    if (isAbort(err) || ctx.signal.aborted) return;
    if (err instanceof ApiError && err.status === 404) {
      renderNotFound(main, ctx);
      return;
    }
    main.append(
      el('div', { class: 'error-banner', role: 'alert' },
        el('p', {}, label(state.lang, 'loadFailed')),
        el('button', { type: 'button', onclick: () => ctx.rerender() }, label(state.lang, 'retry')),
      ),
    );
    return;
  }
  if (ctx.signal.aborted) return;

  const page = el('article', { class: 'dataset-page' });
  main.append(page);

  const backTarget: ViewState = { ...state, view: 'catalog', dataset: null };
  page.append(
    el('a', {
      class: 'back-link',
      href: encodeViewState(backTarget),
      onclick: (event: Event) => {
        event.preventDefault();
        ctx.navigate({ ...ctx.state, view: 'catalog', dataset: null });
      },
    }, '← ' + label(state.lang, 'backToCatalog')),
  );

  const header = el('header', { class: 'dataset-header' });
  if (doc.thumbnail) {
    header.append(el('img', {
      class: 'main-visual',
      src: ctx.client.imageUrl(doc.thumbnail),
      alt: doc.title,
    }));
  }
  header.append(
    el('div', { class: 'dataset-heading' },
      el('h1', { class: 'dataset-title' }, doc.title),
      el('p', { class: 'dataset-badges' },
        ...doc.discipline.map((d) => el('span', { class: 'badge' }, d)),
        el('span', { class: 'badge badge-kind' }, doc.data_kind.replace('_', ' ')),
      ),
      el('p', { class: 'dataset-access' }, label(state.lang, 'accessCount')(doc.access_count)),
    ),
  );
  page.append(header);

  if (doc.description) {
    page.append(el('p', { class: 'dataset-description' }, doc.description));
  }

  if (doc.download_enabled) {
    page.append(buildDownloadSection(ctx, doc));
  }

  if (doc.show_visualized) {
    page.append(await buildVisualsStrip(ctx, doc));
    if (ctx.signal.aborted) return;
  }

  page.append(await buildRelatedSection(ctx, doc));
  if (ctx.signal.aborted) return;

  page.append(buildMetadataSection(ctx, doc));
}

function buildDownloadSection(ctx: RenderContext, doc: DatasetDoc): HTMLElement {
  const lang = ctx.state.lang;
  const section = el('section', { class: 'download-section' });
  section.append(el('h2', {}, label(lang, 'download')));

  const fromInput = el('input', { type: 'date', class: 'date-from', value: ctx.state.from ?? '' });
  const toInput = el('input', { type: 'date', class: 'date-to', value: ctx.state.to ?? '' });
  const downloadLink = el('a', { class: 'download-button' }, label(lang, 'download'));

  let format: 'original' | 'ascii' = 'original';

  function syncDownloadLink(): void {
    const from = fromInput.value;
    const to = toInput.value;
    if (from && to) {
      downloadLink.setAttribute('href', ctx.client.downloadUrl(doc.id, { from, to, format }));
      downloadLink.classList.remove('is-disabled');
    } else {
      downloadLink.removeAttribute('href');
      downloadLink.classList.add('is-disabled');
    }
  }

  function storeRange(): void {
    // Range lives in the URL so a shared link preselects it, but edits
    // should not pollute the back stack; replace instead of push.
    ctx.replaceUrl({ ...ctx.state, from: fromInput.value || null, to: toInput.value || null });
    syncDownloadLink();
  }
  fromInput.addEventListener('change', storeRange);
  toInput.addEventListener('change', storeRange);

  const controls = el('div', { class: 'download-controls' },
    el('label', {}, label(lang, 'downloadFrom'), ' ', fromInput),
    el('label', {}, label(lang, 'downloadTo'), ' ', toInput),
  );

  if (doc.conversion_enabled) {
    const formatSelect = el('select', { class: 'format-select', 'aria-label': label(lang, 'format') },
      el('option', { value: 'original' }, label(lang, 'formatOriginal')),
      el('option', { value: 'ascii' }, label(lang, 'formatAscii')),
    );
    formatSelect.addEventListener('change', () => {
      format = formatSelect.value === 'ascii' ? 'ascii' : 'original';
      syncDownloadLink();
    });
    controls.append(el('label', {}, label(lang, 'format'), ' ', formatSelect));
  }

  const calendarHost = el('div', { class: 'calendar-host' });
  controls.append(
    el('button', {
      type: 'button',
      class: 'view-dates-button',
      onclick: () => toggleCalendar(ctx, doc, calendarHost, fromInput, toInput, storeRange),
    }, label(lang, 'viewDates')),
  );

  section.append(controls, calendarHost, downloadLink);
  syncDownloadLink();
  return section;
}

function toggleCalendar(
  ctx: RenderContext,
  doc: DatasetDoc,
  host: HTMLElement,
  fromInput: HTMLInputElement,
  toInput: HTMLInputElement,
  storeRange: () => void,
): void {
  if (host.querySelector('.calendar-overlay')) {
    clear(host);
    return;
  }

  const lang = ctx.state.lang;
  let shown = initialMonth(ctx, doc);

  const overlay = el('div', { class: 'calendar-overlay' });
  host.append(overlay);

  async function show(year: number, month: number): Promise<void> {
    shown = { year, month };
    clear(overlay);

    const title = el('span', { class: 'calendar-title' }, monthLabel(year, month, lang));
    overlay.append(
      el('div', { class: 'calendar-head' },
        el('button', {
          type: 'button', class: 'calendar-prev', 'aria-label': 'previous month',
          onclick: () => {
            const prev = shiftMonth(shown.year, shown.month, -1);
            void show(prev.year, prev.month);
          },
        }, '‹'),
        title,
        el('button', {
          type: 'button', class: 'calendar-next', 'aria-label': 'next month',
          onclick: () => {
            const next = shiftMonth(shown.year, shown.month, 1);
            void show(next.year, next.month);
          },
        }, '›'),
        el('button', {
          type: 'button', class: 'calendar-close',
          onclick: () => clear(host),
        }, label(lang, 'closeCalendar')),
      ),
    );

    let days: Set<number>;
    try {
      const payload = await ctx.client.availableDates(doc.id, year, month, ctx.signal);
      days = new Set(payload.days);
    } catch (err) {
      if (isAbort(err) || ctx.signal.aborted) return;
      overlay.append(el('p', { class: 'calendar-error' }, label(lang, 'loadFailed')));
      return;
    }
    if (ctx.signal.aborted || shown.year !== year || shown.month !== month) return;

    const table = el('table', { class: 'calendar-grid' });
    table.append(el('thead', {}, el('tr', {},
      ...label(lang, 'weekdays').map((d) => el('th', {}, d)))));
    const body = el('tbody', {});
    for (const week of monthGrid(year, month).weeks) {
      const row = el('tr', {});
      for (const day of week) {
        if (day === null) {
          row.append(el('td', { class: 'day day-blank' }));
          continue;
        }
        const available = days.has(day);
        const cell = el('td', {
          class: available ? 'day is-available' : 'day',
          'data-day': day,
        }, String(day));
        if (available) {
          cell.addEventListener('click', () => {
            // First pick fills the start, second pick the end; picking
            // before the current start restarts the range.
            const stamp = isoDate(year, month, day);
            if (!fromInput.value || stamp < fromInput.value) {
              fromInput.value = stamp;
              toInput.value = '';
            } else {
              toInput.value = stamp;
            }
            storeRange();
          });
        }
        row.append(cell);
      }
      body.append(row);
    }
    table.append(body);
    overlay.append(table);
    if (days.size === 0) {
      overlay.append(el('p', { class: 'calendar-empty' }, label(lang, 'noDatesInMonth')));
    }
  }

  void show(shown.year, shown.month);
}

async function buildVisualsStrip(ctx: RenderContext, doc: DatasetDoc): Promise<HTMLElement> {
  const lang = ctx.state.lang;
  const section = el('section', { class: 'visuals-strip' });
  section.append(el('h2', {}, label(lang, 'visualized')));

  try {
    const payload = await ctx.client.visuals(
      doc.id,
      { from: ctx.state.from ?? undefined, to: ctx.state.to ?? undefined },
      ctx.signal,
    );
    if (payload.items.length === 0) {
      section.classList.add('is-empty');
      return section;
    }
    const strip = el('div', { class: 'visual-items' });
    for (const item of payload.items) {
      strip.append(
        el('figure', { class: 'visual-item' },
          el('img', { src: item.url, alt: item.timestamp ?? doc.title, loading: 'lazy' }),
          el('figcaption', {}, item.timestamp ? item.timestamp.slice(0, 10) : doc.title),
        ),
      );
    }
    section.append(strip);
  } catch (err) {
    if (!isAbort(err)) section.classList.add('is-empty');
  }
  return section;
}

async function buildRelatedSection(ctx: RenderContext, doc: DatasetDoc): Promise<HTMLElement> {
  const lang = ctx.state.lang;
  const section = el('section', { class: 'related-list' });
  section.append(el('h2', {}, label(lang, 'relatedHeading')));

  try {
    const payload = await ctx.client.related(doc.id, lang, ctx.signal);
    if (payload.items.length === 0) {
      section.append(el('p', { class: 'related-empty' }, label(lang, 'noRelated')));
      return section;
    }
    const list = el('ul', { class: 'related-items' });
    for (const item of payload.items) {
      const target: ViewState = { ...ctx.state, view: 'dataset', dataset: item.id };
      list.append(
        el('li', {},
          el('a', {
            class: 'related-card',
            href: encodeViewState(target),
            'data-dataset-id': item.id,
            onclick: (event: Event) => {
              event.preventDefault();
              ctx.navigate({ ...ctx.state, view: 'dataset', dataset: item.id });
            },
          },
            el('span', { class: 'related-title' }, item.title),
            el('span', { class: 'related-score' }, `${item.method} ${item.score.toFixed(2)}`),
          ),
        ),
      );
    }
    section.append(list);
  } catch (err) {
    if (!isAbort(err)) {
      section.append(el('p', { class: 'related-empty' }, label(lang, 'noRelated')));
    }
  }
  return section;
}

function buildMetadataSection(ctx: RenderContext, doc: DatasetDoc): HTMLElement {
  const lang = ctx.state.lang;
  const section = el('section', { class: 'metadata-section' });
  section.append(el('h2', {}, label(lang, 'metadataHeading')));

  const rows: [string, string][] = [];
  if (doc.temporal_coverage) {
    rows.push([label(lang, 'coverageLabel'),
      `${doc.temporal_coverage[0].slice(0, 10)} / ${doc.temporal_coverage[1].slice(0, 10)}`]);
  }
  if (doc.site) {
    const coords = doc.site.lat !== null && doc.site.lon !== null
      ? ` (${doc.site.lat.toFixed(2)}, ${doc.site.lon.toFixed(2)})`
      : '';
    rows.push([label(lang, 'siteLabel'), doc.site.name + coords]);
  }
  rows.push(...doc.metadata_display);

  const table = el('table', { class: 'meta-table' },
    el('tbody', {}, ...rows.map(([key, value]) =>
      el('tr', {}, el('th', { scope: 'row' }, key), el('td', {}, value)))),
  );
  section.append(table);

  if (doc.contacts.length > 0) {
    section.append(
      el('h3', {}, label(lang, 'contactsHeading')),
      el('ul', { class: 'contact-list' },
        ...doc.contacts.map((c) => el('li', {},
          el('span', { class: 'contact-name' }, c.name),
          c.affiliation ? ` · ${c.affiliation}` : '',
          c.email ? el('a', { href: `mailto:${c.email}`, class: 'contact-email' }, ` ${c.email}`) : '',
        )),
      ),
    );
  }
  return section;
}
