import type {
  AvailableDates,
  ConfigInfo,
  DatasetDoc,
  GraphDoc,
  RelatedItem,
  SearchPage,
  VisualItem,
} from './types.js';
import type { Combine, Lang, SortKey } from './viewstate.js';

export class ApiError extends Error {
  status: number;
  detail: string;

  constructor(status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`);
    this.name = 'ApiError';
    this.status = status;
    this.detail = detail;
  }
}

export interface SearchRequest {
  q: string;
  chips: string[];
  combine: Combine;
  sort: SortKey;
  seed: number | null;
  page: number;
  pageSize: number;
  lang: Lang;
}

export interface DownloadRequest {
  from: string;
  to: string;
  format: 'original' | 'ascii';
}

type FetchLike = (url: string, init?: { signal?: AbortSignal }) => Promise<Response>;

export interface ApiClient {
  config(signal?: AbortSignal): Promise<ConfigInfo>;
  searchDatasets(req: SearchRequest, signal?: AbortSignal): Promise<SearchPage>;
  getDataset(id: string, lang: Lang, signal?: AbortSignal): Promise<DatasetDoc>;
  availableDates(id: string, year: number, month: number, signal?: AbortSignal): Promise<AvailableDates>;
  related(id: string, lang: Lang, signal?: AbortSignal): Promise<{ items: RelatedItem[] }>;
  visuals(id: string, range: { from?: string; to?: string }, signal?: AbortSignal): Promise<{ items: VisualItem[] }>;
  network(signal?: AbortSignal): Promise<GraphDoc>;
  downloadUrl(id: string, req: DownloadRequest): string;
  imageUrl(path: string): string;
}

/**
 * Thin typed wrapper over fetch. Every request the UI makes goes
 * through here, which is what the contract tests pin down: any call
 * outside this surface fails against the recorded stub.
 */
export function createClient(base = '', fetchImpl?: FetchLike): ApiClient {
  const doFetch: FetchLike = fetchImpl ?? ((url, init) => fetch(url, init));

  async function getJson<T>(path: string, params: URLSearchParams | null, signal?: AbortSignal): Promise<T> {
    const qs = params && [...params].length ? `?${params.toString()}` : '';
    const response = await doFetch(`${base}${path}${qs}`, { signal });
    if (!response.ok) {
      let detail = response.statusText || 'request failed';
      try {
        const body = await response.json();
        if (body && typeof body.detail === 'string') detail = body.detail;
      } catch {
        // non-JSON error body, keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  return {
    config(signal) {
      return getJson<ConfigInfo>('/api/config', null, signal);
    },

    searchDatasets(req, signal) {
      const params = new URLSearchParams();
      if (req.q) params.set('q', req.q);
      for (const chip of req.chips) params.append('chips', chip);
      params.set('combine', req.combine);
      params.set('sort', req.sort);
      if (req.seed !== null) params.set('seed', String(req.seed));
      params.set('page', String(req.page));
      params.set('page_size', String(req.pageSize));
      params.set('lang', req.lang);
      return getJson<SearchPage>('/api/datasets', params, signal);
    },

    getDataset(id, lang, signal) {
      const params = new URLSearchParams({ lang });
      return getJson<DatasetDoc>(`/api/datasets/${encodeURIComponent(id)}`, params, signal);
    },

    availableDates(id, year, month, signal) {
      const params = new URLSearchParams({ year: String(year), month: String(month) });
      return getJson<AvailableDates>(
        `/api/datasets/${encodeURIComponent(id)}/available-dates`, params, signal);
    },

    related(id, lang, signal) {
      const params = new URLSearchParams({ lang });
      return getJson<{ items: RelatedItem[] }>(
        `/api/datasets/${encodeURIComponent(id)}/related`, params, signal);
    },

    visuals(id, range, signal) {
      const params = new URLSearchParams();
      if (range.from) params.set('from', range.from);
      if (range.to) params.set('to', range.to);
      return getJson<{ items: VisualItem[] }>(
        `/api/datasets/${encodeURIComponent(id)}/visuals`, params, signal);
    },

    network(signal) {
      return getJson<GraphDoc>('/api/network', null, signal);
    },

    downloadUrl(id, req) {
      const params = new URLSearchParams({ from: req.from, to: req.to, format: req.format });
      return `${base}/api/datasets/${encodeURIComponent(id)}/download?${params.toString()}`;
    },

    imageUrl(path) {
      if (!path) return '';
      if (/^https?:\/\//.test(path)) return path;
      return `${base}/api/images/${path}`;
    },
  };
}
