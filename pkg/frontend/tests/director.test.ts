/**
 * Director console through the DOM: the suspend flow collects a window and
 * asks for confirmation, account creation parks the hire in the idle pane,
 * administrator changes capture director authorization, reports run and
 * export, appeals get resolved.
 */

import { afterAll, beforeAll, beforeEach, describe, expect, it, vi } from "vitest";

import { Account, OmsApi } from "../src/api.js";
import { directorView } from "../src/views/director.js";
import { Backend, PASSWORD, USERS, direct, directLogin, startBackend,
         waitFor } from "./server.js";

let backend: Backend;
let root: HTMLElement;

beforeAll(async () => {
  backend = await startBackend();
});

afterAll(async () => {
  await backend.stop();
});

beforeEach(() => {
  document.body.innerHTML = "";
  root = document.createElement("div");
  document.body.append(root);
});

async function mountAs(username: string): Promise<{ api: OmsApi; me: Account }> {
  const api = new OmsApi(backend.baseUrl);
  const session = await api.login(username, PASSWORD);
  api.attach(session.token, session.csrf_token);
  root.replaceChildren(directorView(api, session.account, backend.dates[0]));
  await waitFor(() => root.querySelector(".accounts-pane h4") !== null);
  return { api, me: session.account };
}

function setValue(selector: string, value: string): void {
  const input = root.querySelector<HTMLInputElement>(selector);
  if (!input) throw new Error(`nothing matches ${selector}`);
  input.value = value;
  input.dispatchEvent(new Event("change", { bubbles: true }));
}

describe("director console", () => {
  it("suspend flow collects start and end and wants confirmation", async () => {
    await mountAs(USERS.director);
    const victim = await directLogin(backend.baseUrl, USERS.staff[2]);
    setValue("input[name=target_id]", String(victim.account.id));
    setValue("input[name=suspend_start]", backend.dates[1]);
    setValue("input[name=suspend_end]", backend.dates[3]);
    root.querySelector<HTMLElement>(".suspend-account")!.click();
    await waitFor(() => root.querySelector(".confirm-bar") !== null);
    expect(root.querySelector(".confirm-bar")!.textContent)
      .toContain(`from ${backend.dates[1]} to ${backend.dates[3]}`);
    root.querySelector<HTMLElement>(".confirm-yes")!.click();
    await waitFor(() => root.querySelector(".notice.success") !== null);

    const denied = await direct(backend.baseUrl, "POST", "/auth/login",
                                { username: USERS.staff[2], password: PASSWORD });
    expect(denied.status).toBe(403);
    expect(denied.body.rule_id).toBe("BR2");
  });

  it("a backwards window is refused by the server and shown", async () => {
    await mountAs(USERS.director);
    const victim = await directLogin(backend.baseUrl, USERS.staff[1]);
    setValue("input[name=target_id]", String(victim.account.id));
    setValue("input[name=suspend_start]", backend.dates[3]);
    setValue("input[name=suspend_end]", backend.dates[1]);
    root.querySelector<HTMLElement>(".suspend-account")!.click();
    await waitFor(() => root.querySelector(".confirm-bar") !== null);
    root.querySelector<HTMLElement>(".confirm-yes")!.click();
    await waitFor(() => root.querySelector(".accounts-pane .notice.error") !== null);
  });

  it("creating an employee parks it in the idle pane", async () => {
    await mountAs(USERS.director);
    setValue("input[name=first_name]", "Freya");
    setValue("input[name=surname]", "Quinn");
    setValue("input[name=recruitment_no]", "00777");
    root.querySelector<HTMLElement>(".create-employee")!.click();
    await waitFor(() => root.querySelector(".accounts-pane .notice.success") !== null);
    expect(root.querySelector(".accounts-pane .notice.success")!.textContent)
      .toContain("fquinn");
    await waitFor(() => root.querySelector(".idle-pane table") !== null);
    expect(root.querySelector(".idle-pane")!.textContent).toContain("fquinn");
  });

  it("administrator changes carry the captured director authorization", async () => {
    await mountAs(USERS.administrator);
    const target = await directLogin(backend.baseUrl, USERS.staff[0]);
    setValue("input[name=target_id]", String(target.account.id));

    root.querySelector<HTMLElement>(".modify-role")!.click();
    await waitFor(() => root.querySelector(".accounts-pane .notice.error") !== null);
    expect(root.querySelector(".accounts-pane .notice.error")!.textContent)
      .toContain("BR19");

    const checkbox = root.querySelector<HTMLInputElement>(
      "input[name=director_authorization]")!;
    checkbox.checked = true;
    root.querySelector<HTMLElement>(".modify-role")!.click();
    await waitFor(() => root.querySelector(".accounts-pane .notice.success") !== null);
  });

  it("runs a report, renders the server's rows, and exports CSV", async () => {
    await mountAs(USERS.director);
    (URL as unknown as { createObjectURL: () => string }).createObjectURL =
      vi.fn(() => "blob:fake");
    setValue("input[name=param]", backend.dates[0].slice(0, 7));
    root.querySelector<HTMLElement>(".run-report")!.click();
    await waitFor(() => root.querySelector(".report-output table") !== null);
    expect(root.querySelector(".report-output")!.textContent).toContain("net");
    root.querySelector<HTMLElement>(".export-csv")!.click();
    await waitFor(() => root.querySelector(".report-output a[download]") !== null);
    await waitFor(() => root.querySelector(".report-history .history-entry") !== null);
  });

  it("resolves a pending appeal from the queue", async () => {
    const supervisor = await directLogin(backend.baseUrl, USERS.supervisor);
    const shifts = await direct(backend.baseUrl, "GET",
                                `/shifts?date=${backend.dates[0]}`, undefined,
                                supervisor);
    const shift = (shifts.body.shifts as { id: number; staff: number[] }[])[0];
    const rating = await direct(backend.baseUrl, "POST", "/ratings/employees",
                                { employee_id: shift.staff[0],
                                  shift_id: shift.id, score: 1 }, supervisor);
    const staff = await directLogin(backend.baseUrl, USERS.staff[0]);
    await direct(backend.baseUrl, "POST", "/appeals",
                 { rating_id: rating.body.id, reason: "harsh" }, staff);

    await mountAs(USERS.director);
    await waitFor(() => root.querySelector(".appeal-row") !== null);
    const row = root.querySelector(".appeal-row")!;
    row.querySelector<HTMLSelectElement>("select[name=new_score]")!.value = "4";
    row.querySelector<HTMLElement>(".revise-appeal")!.click();
    await waitFor(() => root.querySelector(".appeals-pane .notice.info") !== null);

    const mine = await direct(backend.baseUrl, "GET",
                              `/ratings/employees/${shift.staff[0]}`,
                              undefined, staff);
    const revised = (mine.body.ratings as { id: number; state: string;
                                            revised_score: number | null }[])
      .find((r) => r.id === rating.body.id)!;
    expect(revised.state).toBe("revised");
    expect(revised.revised_score).toBe(4);
  });
});
