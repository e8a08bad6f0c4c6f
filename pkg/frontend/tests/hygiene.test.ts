/**
 * Client hygiene: no credential ever rendered or stored beyond the opaque
 * session token, no client-side credential logic in the source at all, and
 * displayed money comes verbatim from API responses.
 */

import { readFileSync, readdirSync, statSync } from "node:fs";
import { join } from "node:path";

import { afterAll, beforeAll, beforeEach, describe, expect, it } from "vitest";

import { OmsApi } from "../src/api.js";
import { startApp } from "../src/app.js";
import { clearSession } from "../src/session.js";
import { Backend, PASSWORD, USERS, direct, directLogin, startBackend,
         waitFor } from "./server.js";

let backend: Backend;
let root: HTMLElement;
let api: OmsApi;

beforeAll(async () => {
  backend = await startBackend();
});

afterAll(async () => {
  await backend.stop();
});

beforeEach(() => {
  document.body.innerHTML = "";
  sessionStorage.clear();
  root = document.createElement("div");
  document.body.append(root);
  api = new OmsApi(backend.baseUrl);
  clearSession(api);
  window.location.hash = "#/home";
});

function* sourceFiles(dir: string): Generator<string> {
  for (const entry of readdirSync(dir)) {
    const path = join(dir, entry);
    if (statSync(path).isDirectory()) yield* sourceFiles(path);
    else if (path.endsWith(".ts")) yield path;
  }
}

describe("credential hygiene", () => {
  it("the page never contains the password after login", async () => {
    startApp(root, api);
    await waitFor(() => root.querySelector(".login-submit") !== null);
    const username = root.querySelector<HTMLInputElement>("input[name=username]")!;
    const password = root.querySelector<HTMLInputElement>("input[name=password]")!;
    username.value = USERS.customer;
    username.dispatchEvent(new Event("change", { bubbles: true }));
    password.value = PASSWORD;
    password.dispatchEvent(new Event("change", { bubbles: true }));
    root.querySelector<HTMLElement>(".login-submit")!.click();
    await waitFor(() => root.querySelector(".start-wizard") !== null);
    expect(document.documentElement.outerHTML).not.toContain(PASSWORD);
    expect(document.documentElement.outerHTML).not.toContain("password_hash");
  });

  it("browser storage holds the opaque tokens and nothing else", async () => {
    startApp(root, api);
    await waitFor(() => root.querySelector(".login-submit") !== null);
    const username = root.querySelector<HTMLInputElement>("input[name=username]")!;
    const password = root.querySelector<HTMLInputElement>("input[name=password]")!;
    username.value = USERS.customer;
    password.value = PASSWORD;
    root.querySelector<HTMLElement>(".login-submit")!.click();
    await waitFor(() => sessionStorage.getItem("oms_token") !== null);
    expect(Object.keys(sessionStorage).sort()).toEqual(["oms_csrf", "oms_token"]);
    expect(sessionStorage.getItem("oms_token")).toMatch(/^[0-9a-f]{32}$/);
    for (const value of [sessionStorage.getItem("oms_token")!,
                         sessionStorage.getItem("oms_csrf")!]) {
      expect(value).not.toContain(PASSWORD);
    }
    expect(localStorage.length).toBe(0);
  });

  it("no client-side credential comparisons or markup injection anywhere", () => {
    const sources = [...sourceFiles(join(__dirname, "..", "src"))];
    expect(sources.length).toBeGreaterThan(5);
    for (const file of sources) {
      const text = readFileSync(file, "utf-8");
      // the client never evaluates a password against anything
      expect(text).not.toMatch(/password[^\n]*===?\s*["'`]/i);
      expect(text).not.toMatch(/["'`][^\n]*===?\s*[^\n]*password/i);
      // and never builds HTML from strings
      expect(text).not.toContain("innerHTML");
      expect(text).not.toContain("insertAdjacentHTML");
      expect(text).not.toContain("document.write");
    }
  });

  it("displayed money equals the API's numbers verbatim", async () => {
    const customer = await directLogin(backend.baseUrl, USERS.customer);
    const order = await direct(backend.baseUrl, "POST", "/orders/services", {
      services: ["regular-clean"], date: backend.dates[2], time: "10:00",
      location: "Hygiene House",
      premises: { square_feet: 700, rooms: 3, floors: 1,
                  surface_kind: "carpet", area_kind: "room" },
      payment_method: "card",
    }, customer);
    const total = (order.body as { breakdown: { total: number } }).breakdown.total;

    const ui = new OmsApi(backend.baseUrl);
    const session = await ui.login(USERS.customer, PASSWORD);
    ui.attach(session.token, session.csrf_token);
    const { customerView } = await import("../src/views/customer.js");
    root.replaceChildren(customerView(ui, backend.dates[2]));
    await waitFor(() => root.querySelector(".history-mount table") !== null);
    const pounds = `£${Math.floor(total / 100)}.` +
      `${String(total % 100).padStart(2, "0")}`;
    expect(root.querySelector(".history-mount")!.textContent).toContain(pounds);
  });
});
