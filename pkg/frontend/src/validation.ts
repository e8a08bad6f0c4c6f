/**
 * Client-side validation is a convenience layer only: it shortens the
 * feedback loop but never decides anything. The whole layer can be switched
 * off (the contract tests do exactly that) and every outcome must stay
 * identical, because the server re-checks everything.
 */

let enabled = true;

export function setClientValidation(on: boolean): void {
  enabled = on;
}

export function clientValidationEnabled(): boolean {
  return enabled;
}

/** Returns the hint message when the check fails and validation is on. */
export function hint(valid: boolean, message: string): string | null {
  if (!enabled) return null;
  return valid ? null : message;
}

export function firstHint(...hints: (string | null)[]): string | null {
  for (const h of hints) if (h) return h;
  return null;
}
