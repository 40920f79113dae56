import { createClient } from '../src/api.js';
import { mountApp, type App } from '../src/app.js';
import { recordedStub, type Stub, type StubRoute } from './stub.js';

import configFx from './fixtures/config.json';

export { configFx };

export interface Mounted {
  app: App;
  stub: Stub;
  root: HTMLElement;
}

let active: App | null = null;

/** Mounts the app at a deep link, backed by the recorded stub. */
export function mountAt(hash: string, routes: StubRoute[]): Mounted {
  active?.destroy();
  document.body.innerHTML = '<div id="app"></div>';
  const root = document.getElementById('app')!;
  window.location.hash = hash;

  const stub = recordedStub(routes);
  const client = createClient('', stub.fetchImpl);
  const app = mountApp(root, { client });
  active = app;
  return { app, stub, root };
}

export function teardown(): void {
  active?.destroy();
  active = null;
  document.body.innerHTML = '';
}

export const configRoute: StubRoute = { path: '/api/config', fixture: configFx };

export function click(target: Element | null): void {
  if (!target) throw new Error('click target not found');
  (target as HTMLElement).dispatchEvent(new MouseEvent('click', { bubbles: true, cancelable: true }));
}

export function text(selector: string): string {
  return document.querySelector(selector)?.textContent?.trim() ?? '';
}
