/**
 * Application shell: hash router, login, role dashboards, help.
 *
 * The shell never computes business results; it routes, renders what the
 * API returns, and keeps only the opaque session token client-side.
 */

import { OmsApi } from "./api.js";
import { button, el, field, helpLink, notice, page, textInput } from "./dom.js";
import * as flows from "./flows.js";
import { activeSession, clearSession, markUnrestricted, storeSession } from "./session.js";
import { customerView } from "./views/customer.js";
import { directorView } from "./views/director.js";
import { staffView } from "./views/staff.js";
import { supervisorView } from "./views/supervisor.js";
import { supplierView } from "./views/supplier.js";

export function todayIso(): string {
  return new Date().toISOString().slice(0, 10);
}

export function startApp(root: HTMLElement, api: OmsApi): void {
  const shell = el("div", { class: "shell" });
  const mount = el("main", { id: "view" });
  shell.append(renderNav(api, () => route(api, mount)), mount);
  root.replaceChildren(shell);
  window.addEventListener("hashchange", () => route(api, mount));
  route(api, mount);
}

function renderNav(api: OmsApi, rerender: () => void): HTMLElement {
  const nav = el("nav", { "aria-label": "primary" },
    el("a", { href: "#/home" }, "Home"), helpLink());
  const logout = button("Log out", async () => {
    try { await api.logout(); } catch { /* session may already be gone */ }
    clearSession(api);
    window.location.hash = "#/login";
    rerender();
  }, { class: "logout" });
  nav.append(logout);
  return nav;
}

export function route(api: OmsApi, mount: HTMLElement): void {
  const hash = window.location.hash || "#/home";
  if (hash.startsWith("#/help")) {
    mount.replaceChildren(helpPage());
    return;
  }
  const session = activeSession();
  if (!session) {
    mount.replaceChildren(loginPage(api, mount));
    return;
  }
  if (session.restricted) {
    mount.replaceChildren(passwordPage(api, mount));
    return;
  }
  const today = todayIso();
  const views: Record<string, () => HTMLElement> = {
    customer: () => customerView(api, today),
    director: () => directorView(api, session.account, today),
    administrator: () => directorView(api, session.account, today),
    supervisor: () => supervisorView(api, today),
    cleaning_staff: () => staffView(api, session.account),
    supplier: () => supplierView(api, session.account, today),
  };
  const view = views[session.account.role];
  mount.replaceChildren(view ? view() : notice("error", "unknown role"));
}

function loginPage(api: OmsApi, mount: HTMLElement): HTMLElement {
  const username = textInput("username", "", { autocomplete: "username" });
  const password = el("input", { type: "password", name: "password" });
  const slot = el("div", { class: "problems" });
  const signupMount = el("div", { class: "signup" });

  const submit = button("Sign in", async () => {
    const outcome = await flows.login(api, username.value, password.value);
    if (!outcome.ok) {
      slot.replaceChildren(notice("error", outcome.message ?? "login failed"));
      return;
    }
    storeSession(api, outcome.data!);
    route(api, mount);
  }, { class: "login-submit" });

  signupMount.append(button("New customer? Create an account",
    () => signupMount.replaceChildren(signupForm(api)),
    { class: "open-signup" }));

  return page("Sign in",
    field("Username or email", username), field("Password", password),
    submit, slot, signupMount);
}

function signupForm(api: OmsApi): HTMLElement {
  const email = textInput("email", "");
  const confirm = textInput("email_confirm", "");
  const slot = el("div", { class: "problems" });
  return el("form", { class: "signup-form" },
    field("Email", email), field("Email again", confirm),
    button("Create account", async () => {
      const outcome = await flows.signUp(api, email.value, confirm.value);
      slot.replaceChildren(outcome.ok
        ? notice("success", "account created — the activation password is in "
            + "your inbox; sign in with it to finish")
        : notice("error", outcome.message ?? "signup failed"));
    }, { class: "signup-submit" }),
    slot);
}

function passwordPage(api: OmsApi, mount: HTMLElement): HTMLElement {
  const oldPassword = el("input", { type: "password", name: "old_password" });
  const newPassword = el("input", { type: "password", name: "new_password" });
  const slot = el("div", { class: "problems" });
  return page("Set a new password",
    notice("info", "Your password is provisional or stale; set a new one to continue."),
    field("Current password", oldPassword), field("New password", newPassword),
    button("Change password", async () => {
      const outcome = await flows.run(() =>
        api.changePassword(oldPassword.value, newPassword.value));
      if (!outcome.ok) {
        slot.replaceChildren(notice("error", outcome.message ?? "not changed"));
        return;
      }
      markUnrestricted();
      route(api, mount);
    }, { class: "password-submit" }),
    slot);
}

function helpPage(): HTMLElement {
  return page("Help",
    el("p", {}, "Every page links here. Quick orientation by role:"),
    el("ul", {},
      el("li", {}, "Customers: book cleans with the wizard (your half-finished "
        + "order is recoverable after a dropped connection), rate completed "
        + "jobs from the checklist, print or part-save the feedback form."),
      el("li", {}, "Directors: run and export reports, create or suspend "
        + "accounts (suspensions need a start and end date), resolve appeals."),
      el("li", {}, "Supervisors: pick your shift, enter times or amounts, "
        + "check the computed read-back, then confirm."),
      el("li", {}, "Cleaning staff: your rotor and your own ratings; appeal "
        + "any rating that affects you."),
      el("li", {}, "Suppliers: edit dated menus and define promotions.")),
    el("p", {}, "Everything works with the keyboard alone: Tab moves, "
      + "Enter activates."));
}
