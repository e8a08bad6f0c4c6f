/**
 * Session holder. Only the opaque tokens ever touch browser storage —
 * no password, no account data, nothing derivable.
 */

import { Account, OmsApi, Session } from "./api.js";

const TOKEN_KEY = "oms_token";
const CSRF_KEY = "oms_csrf";

export interface ActiveSession {
  account: Account;
  restricted: boolean;
}

let current: ActiveSession | null = null;

export function storeSession(api: OmsApi, session: Session): ActiveSession {
  api.attach(session.token, session.csrf_token);
  try {
    sessionStorage.setItem(TOKEN_KEY, session.token);
    sessionStorage.setItem(CSRF_KEY, session.csrf_token);
  } catch {
    // storage unavailable: the in-memory session still works for this tab
  }
  current = { account: session.account, restricted: session.restricted };
  return current;
}

export function activeSession(): ActiveSession | null {
  return current;
}

export function markUnrestricted(): void {
  if (current) current.restricted = false;
}

export function clearSession(api: OmsApi): void {
  api.detach();
  current = null;
  try {
    sessionStorage.removeItem(TOKEN_KEY);
    sessionStorage.removeItem(CSRF_KEY);
  } catch {
    // ignore
  }
}
