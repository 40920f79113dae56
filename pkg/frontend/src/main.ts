import { createClient } from './api.js';
import { mountApp } from './app.js';

// Same-origin by default; a <meta name="api-base"> tag points the UI at
// a catalog server on another host.
const meta = document.querySelector('meta[name="api-base"]');
const base = (meta?.getAttribute('content') ?? '').replace(/\/+$/, '');

const root = document.getElementById('app');
if (root) {
  mountApp(root, { client: createClient(base) });
}
