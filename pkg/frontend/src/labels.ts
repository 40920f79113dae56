import type { Lang } from './viewstate.js';

const STRINGS = {
  searchPlaceholder: { en: 'Search datasets...', ja: 'データセットを検索...' },
  searchButton: { en: 'Search', ja: '検索' },
  sortLabel: { en: 'Sort', ja: '並び順' },
  sortRandom: { en: 'Random', ja: 'ランダム' },
  sortAccess: { en: 'Most accessed', ja: 'アクセス数順' },
  sortTitle: { en: 'Title', ja: 'タイトル順' },
  noResults: { en: 'No datasets matched this search.', ja: '該当するデータセットはありません。' },
  noResultsHint: { en: 'Try fewer terms or switch the match mode to OR.', ja: '検索語を減らすか、OR 検索をお試しください。' },
  loadFailed: { en: 'Could not reach the catalog.', ja: 'カタログに接続できませんでした。' },
  retry: { en: 'Retry', ja: '再試行' },
  prevPage: { en: 'Previous', ja: '前へ' },
  nextPage: { en: 'Next', ja: '次へ' },
  pageOf: { en: (p: number, n: number) => `Page ${p} of ${n}`, ja: (p: number, n: number) => `${n}ページ中${p}ページ目` },
  resultCount: { en: (n: number) => `${n} dataset${n === 1 ? '' : 's'}`, ja: (n: number) => `${n}件` },
  accessCount: { en: (n: number) => `${n} accesses`, ja: (n: number) => `アクセス数 ${n}` },
  download: { en: 'Download', ja: 'ダウンロード' },
  downloadFrom: { en: 'From', ja: '開始日' },
  downloadTo: { en: 'To', ja: '終了日' },
  format: { en: 'Format', ja: '形式' },
  formatOriginal: { en: 'Original files', ja: '元ファイル' },
  formatAscii: { en: 'Converted text', ja: 'テキスト変換' },
  viewDates: { en: 'View Available Dates', ja: '取得可能な日付を見る' },
  closeCalendar: { en: 'Close', ja: '閉じる' },
  noDatesInMonth: { en: 'No data this month.', ja: 'この月のデータはありません。' },
  visualized: { en: 'Visualized Data', ja: '可視化データ' },
  relatedHeading: { en: 'Related Datasets', ja: '関連データセット' },
  noRelated: { en: 'No related datasets yet.', ja: '関連データセットはまだありません。' },
  metadataHeading: { en: 'Metadata', ja: 'メタデータ' },
  contactsHeading: { en: 'Contacts', ja: '連絡先' },
  siteLabel: { en: 'Observation site', ja: '観測地点' },
  coverageLabel: { en: 'Temporal coverage', ja: '観測期間' },
  notFoundTitle: { en: 'Dataset not found', ja: 'データセットが見つかりません' },
  notFoundBody: { en: 'No dataset exists with this id. It may have been removed from the catalog.', ja: 'この ID のデータセットは存在しません。カタログから削除された可能性があります。' },
  backToCatalog: { en: 'Back to catalog', ja: 'カタログへ戻る' },
  networkEmpty: { en: 'No keyword network has been published for this catalog.', ja: 'キーワードネットワークは公開されていません。' },
  networkHint: { en: 'Click a term to search the catalog for it.', ja: '用語をクリックするとカタログを検索します。' },
  navCatalog: { en: 'Catalog', ja: 'カタログ' },
  navNetwork: { en: 'Keyword Network', ja: 'キーワードネットワーク' },
  weekdays: { en: ['Su', 'Mo', 'Tu', 'We', 'Th', 'Fr', 'Sa'], ja: ['日', '月', '火', '水', '木', '金', '土'] },
} as const;

type Strings = typeof STRINGS;

// The en/ja variants share a shape per key; widen literal strings so a
// lookup with a runtime language typechecks.
type Widen<T> = T extends string ? string : T extends readonly string[] ? readonly string[] : T;

export function label<K extends keyof Strings>(lang: Lang, key: K): Widen<Strings[K]['en']> {
  return STRINGS[key][lang] as Widen<Strings[K]['en']>;
}
