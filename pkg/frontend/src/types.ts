// Response shapes for the catalog HTTP API. Field names mirror the
// wire format exactly; keep them snake_case.

export interface ConfigInfo {
  chips: string[];
  languages: string[];
  snapshot_version: number;
  related_threshold: number;
  related_k: number;
}

export interface ListingItem {
  id: string;
  title: string;
  snippet: string;
  thumbnail: string;
  discipline: string[];
  keywords: string[];
  data_kind: string;
  access_count: number;
}

export interface SearchPage {
  total: number;
  page: number;
  page_size: number;
  sort: string;
  seed: number | null;
  items: ListingItem[];
}

export interface ContactInfo {
  role: string;
  name: string;
  affiliation: string;
  email: string | null;
}

export interface DatasetDoc extends ListingItem {
  description: string;
  source_id: string;
  source_schema: string;
  metadata_display: [string, string][];
  site: { name: string; lat: number | null; lon: number | null } | null;
  temporal_coverage: [string, string] | null;
  contacts: ContactInfo[];
  download_enabled: boolean;
  conversion_enabled: boolean;
  show_visualized: boolean;
  granularity: string;
}

export interface AvailableDates {
  year: number;
  month: number;
  days: number[];
}

export interface RelatedItem {
  id: string;
  score: number;
  method: string;
  title: string;
  thumbnail: string;
}

export interface VisualItem {
  timestamp: string | null;
  url: string;
}

export interface GraphNode {
  term: string;
  count: number;
  rate: number;
}

export interface GraphEdge {
  term_a: string;
  term_b: string;
  co_count: number;
}

export interface GraphDoc {
  total_titles: number;
  nodes: GraphNode[];
  edges: GraphEdge[];
}
