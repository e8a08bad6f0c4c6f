/**
 * Contract parity: with client-side validation switched off, every flow in
 * the client produces exactly the outcome a direct API call produces — the
 * client adds convenience, never behavior. Twenty scripted flows, each run
 * through the UI's action layer and through raw fetch, outcomes compared.
 */

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { OmsApi, ApiProblem } from "../src/api.js";
import * as flows from "../src/flows.js";
import { setClientValidation } from "../src/validation.js";
import { Backend, DirectSession, PASSWORD, USERS, direct, directLogin,
         startBackend } from "./server.js";

let backend: Backend;

beforeAll(async () => {
  backend = await startBackend();
  setClientValidation(false); // the whole point: the server decides alone
});

afterAll(async () => {
  setClientValidation(true);
  await backend.stop();
});

interface Normalized {
  ok: boolean;
  status?: number;
  code?: string;
  ruleId?: string;
  extra?: unknown;
}

function fromFlow(outcome: flows.FlowOutcome<unknown>, extra?: unknown): Normalized {
  return { ok: outcome.ok, status: outcome.status, code: outcome.code,
           ruleId: outcome.ruleId, extra };
}

function fromDirect(status: number, body: Record<string, unknown>,
                    extra?: unknown): Normalized {
  return {
    ok: status >= 200 && status < 300,
    status: status >= 400 ? status : undefined,
    code: status >= 400 ? (body.code as string) : undefined,
    ruleId: status >= 400 ? (body.rule_id as string | undefined) : undefined,
    extra,
  };
}

async function uiClient(username: string, password = PASSWORD): Promise<OmsApi> {
  const api = new OmsApi(backend.baseUrl);
  const session = await api.login(username, password);
  api.attach(session.token, session.csrf_token);
  return api;
}

const premises = { square_feet: 500, rooms: 2, floors: 1,
                   surface_kind: "carpet", area_kind: "room" };
const hugePremises = { ...premises, square_feet: 4000 };

/** Create one completed job for the customer, by whichever id comes back. */
async function completedJob(): Promise<number> {
  const customer = await directLogin(backend.baseUrl, USERS.customer);
  const director = await directLogin(backend.baseUrl, USERS.director);
  const order = await direct(backend.baseUrl, "POST", "/orders/services", {
    services: ["regular-clean"], date: backend.dates[2], time: "10:00",
    location: "Parity House", premises, payment_method: "card",
  }, customer);
  const id = order.body.id as number;
  await direct(backend.baseUrl, "POST", `/orders/service:${id}/status`,
               { status: "completed" }, director);
  return id;
}

describe("outcome parity between the client layer and direct API calls", () => {
  it("flow 01: successful sign-in", async () => {
    const api = new OmsApi(backend.baseUrl);
    const ui = fromFlow(await flows.login(api, USERS.director, PASSWORD));
    const raw = await direct(backend.baseUrl, "POST", "/auth/login",
                             { username: USERS.director, password: PASSWORD });
    expect(ui).toEqual(fromDirect(raw.status, raw.body));
  });

  it("flow 02: wrong password is the server's 401, not a client guess", async () => {
    const api = new OmsApi(backend.baseUrl);
    const ui = fromFlow(await flows.login(api, USERS.staff[2], "wrong-pass"));
    const raw = await direct(backend.baseUrl, "POST", "/auth/login",
                             { username: USERS.staff[2], password: "wrong-pass" });
    expect(ui).toEqual(fromDirect(raw.status, raw.body));
    expect(ui.status).toBe(401);
  });

  it("flow 03: signup with mismatched emails", async () => {
    const api = new OmsApi(backend.baseUrl);
    const ui = fromFlow(await flows.signUp(api, "p1@x.net", "p2@x.net"));
    const raw = await direct(backend.baseUrl, "POST", "/accounts", {
      kind: "customer", email: "p1@x.net", email_confirm: "p2@x.net" });
    expect(ui).toEqual(fromDirect(raw.status, raw.body));
    expect(ui.status).toBe(422);
  });

  it("flow 04: successful signup", async () => {
    const api = new OmsApi(backend.baseUrl);
    const ui = fromFlow(await flows.signUp(api, "ui-side@x.net", "ui-side@x.net"));
    const raw = await direct(backend.baseUrl, "POST", "/accounts", {
      kind: "customer", email: "api-side@x.net", email_confirm: "api-side@x.net" });
    expect(ui).toEqual(fromDirect(raw.status, raw.body));
    expect(ui.ok).toBe(true);
  });

  it("flow 05: anonymous menu browse", async () => {
    const api = new OmsApi(backend.baseUrl);
    const date = backend.dates[1];
    const uiMenu = await api.menu(date, "services");
    const raw = await direct(backend.baseUrl, "GET",
                             `/menu?date=${date}&audience=services`);
    expect(uiMenu).toEqual(raw.body);
  });

  it("flow 06: service quote shows the server's numbers verbatim", async () => {
    const api = await uiClient(USERS.customer);
    const ui = await flows.quoteService(api, ["regular-clean"],
                                        backend.dates[2], premises);
    const session = await directLogin(backend.baseUrl, USERS.customer);
    const raw = await direct(backend.baseUrl, "POST", "/orders/services/quote", {
      services: ["regular-clean"], date: backend.dates[2], premises }, session);
    expect(ui.ok).toBe(true);
    expect(ui.data!.breakdown).toEqual(
      (raw.body as { breakdown: unknown }).breakdown);
  });

  it("flow 07: placing a feasible service order", async () => {
    const api = await uiClient(USERS.customer);
    const request = { services: ["regular-clean"], date: backend.dates[3],
                      time: "10:00", location: "Parity House", premises,
                      payment_method: "card" };
    const ui = await flows.placeServiceOrder(api, request);
    const session = await directLogin(backend.baseUrl, USERS.customer);
    const raw = await direct(backend.baseUrl, "POST", "/orders/services",
                             request, session);
    expect(ui.ok && raw.ok).toBe(true);
    expect(ui.data!.status).toBe((raw.body as { status: string }).status);
    expect(ui.data!.breakdown).toEqual((raw.body as { breakdown: unknown }).breakdown);
  });

  it("flow 08: an oversized request earns the same scale-down offer", async () => {
    const api = await uiClient(USERS.customer);
    const request = { services: Array(6).fill("deep-clean"), date: backend.dates[4],
                      time: "10:00", location: "Big Site", premises: hugePremises,
                      payment_method: "card" };
    const ui = await flows.placeServiceOrder(api, request);
    const session = await directLogin(backend.baseUrl, USERS.customer);
    const raw = await direct(backend.baseUrl, "POST", "/orders/services",
                             request, session);
    const uiPlan = ui.data!.scale_down!;
    const rawPlan = (raw.body as { scale_down: typeof uiPlan }).scale_down;
    expect(uiPlan.services).toEqual(rawPlan.services);
    expect(uiPlan.total_minutes).toEqual(rawPlan.total_minutes);
  });

  it("flow 09: accepting the scale-down books the reduced job", async () => {
    const request = { services: Array(6).fill("deep-clean"), date: backend.dates[5],
                      time: "10:00", location: "Big Site", premises: hugePremises,
                      payment_method: "card" };
    const api = await uiClient(USERS.customer);
    const offer = await flows.placeServiceOrder(api, request);
    const ui = await flows.placeServiceOrder(
      api, { ...request, services: offer.data!.scale_down!.services });
    const session = await directLogin(backend.baseUrl, USERS.customer);
    const rawOffer = await direct(backend.baseUrl, "POST", "/orders/services",
                                  { ...request, date: backend.dates[6] }, session);
    const rawPlan = (rawOffer.body as { scale_down: { services: string[] } }).scale_down;
    const raw = await direct(backend.baseUrl, "POST", "/orders/services",
                             { ...request, date: backend.dates[6],
                               services: rawPlan.services }, session);
    expect(ui.ok && raw.ok).toBe(true);
    expect(ui.data!.status).toBe("pending");
    expect((raw.body as { status: string }).status).toBe("pending");
  });

  it("flow 10: director restocks products for pickup", async () => {
    const lines = [{ item_id: "floor-soap", qty: 1 }];
    const api = await uiClient(USERS.director);
    const ui = await flows.placeProductOrder(api, lines, backend.dates[1],
                                             { mode: "pickup" }, "card");
    const session = await directLogin(backend.baseUrl, USERS.director);
    const raw = await direct(backend.baseUrl, "POST", "/orders/products", {
      lines, date: backend.dates[1], delivery: { mode: "pickup" },
      payment_method: "card" }, session);
    expect(ui.ok && raw.ok).toBe(true);
    expect(ui.data!.breakdown).toEqual((raw.body as { breakdown: unknown }).breakdown);
  });

  it("flow 11: ordering more units than the supplier has", async () => {
    const lines = [{ item_id: "heavy-degreaser", qty: 500 }];
    const api = await uiClient(USERS.director);
    const ui = fromFlow(await flows.placeProductOrder(
      api, lines, backend.dates[1], { mode: "pickup" }, "card"));
    const session = await directLogin(backend.baseUrl, USERS.director);
    const raw = await direct(backend.baseUrl, "POST", "/orders/products", {
      lines, date: backend.dates[1], delivery: { mode: "pickup" },
      payment_method: "card" }, session);
    expect(ui).toEqual(fromDirect(raw.status, raw.body));
    expect(ui.code).toBe("max_units");
  });

  it("flow 12: ordering for a past date", async () => {
    const lines = [{ item_id: "floor-soap", qty: 1 }];
    const api = await uiClient(USERS.director);
    const ui = fromFlow(await flows.placeProductOrder(
      api, lines, "2020-01-01", { mode: "pickup" }, "card"));
    const session = await directLogin(backend.baseUrl, USERS.director);
    const raw = await direct(backend.baseUrl, "POST", "/orders/products", {
      lines, date: "2020-01-01", delivery: { mode: "pickup" },
      payment_method: "card" }, session);
    expect(ui).toEqual(fromDirect(raw.status, raw.body));
    expect(ui.status).toBe(422);
  });

  it("flow 13: cancelling an order that is still pending", async () => {
    const request = { services: ["window-clean"], date: backend.dates[3],
                      time: "11:00", location: "Parity House", premises,
                      payment_method: "card" };
    const api = await uiClient(USERS.customer);
    const mine = await flows.placeServiceOrder(api, request);
    const ui = await flows.cancelOrder(api, `service:${mine.data!.id}`);
    const session = await directLogin(backend.baseUrl, USERS.customer);
    const theirs = await direct(backend.baseUrl, "POST", "/orders/services",
                                request, session);
    const raw = await direct(backend.baseUrl, "POST",
                             `/orders/service:${theirs.body.id}/cancel`, {},
                             session);
    expect(ui.ok && raw.ok).toBe(true);
    expect(ui.data!.status).toBe("cancelled");
    expect((raw.body as { status: string }).status).toBe("cancelled");
  });

  it("flow 14: cancelling twice is refused with the current status", async () => {
    const request = { services: ["window-clean"], date: backend.dates[3],
                      time: "12:00", location: "Parity House", premises,
                      payment_method: "card" };
    const api = await uiClient(USERS.customer);
    const mine = await flows.placeServiceOrder(api, request);
    await flows.cancelOrder(api, `service:${mine.data!.id}`);
    const ui = fromFlow(await flows.cancelOrder(api, `service:${mine.data!.id}`));
    const session = await directLogin(backend.baseUrl, USERS.customer);
    const theirs = await direct(backend.baseUrl, "POST", "/orders/services",
                                request, session);
    await direct(backend.baseUrl, "POST",
                 `/orders/service:${theirs.body.id}/cancel`, {}, session);
    const raw = await direct(backend.baseUrl, "POST",
                             `/orders/service:${theirs.body.id}/cancel`, {},
                             session);
    expect(ui).toEqual(fromDirect(raw.status, raw.body));
    expect(ui.status).toBe(403);
  });

  it("flow 15: rating a completed job", async () => {
    const uiJob = await completedJob();
    const api = await uiClient(USERS.customer);
    const ui = await flows.rateJob(api, uiJob,
                                   [{ criterion: "finish", score: 4 }]);
    const rawJob = await completedJob();
    const session = await directLogin(backend.baseUrl, USERS.customer);
    const raw = await direct(backend.baseUrl, "POST", "/ratings/jobs", {
      job_id: rawJob, itemized: [{ criterion: "finish", score: 4 }] }, session);
    expect(ui.ok && raw.ok).toBe(true);
    expect(ui.data!.score).toBe((raw.body as { score: number }).score);
  });

  it("flow 16: rating someone else's job is the server's BR20 denial", async () => {
    const job = await completedJob(); // belongs to the seeded customer
    const stranger = new OmsApi(backend.baseUrl);
    await flows.signUp(stranger, "nosy@x.net", "nosy@x.net");
    // activate: the activation password is in the outbox; fetch as director
    const director = await directLogin(backend.baseUrl, USERS.director);
    const outbox = await direct(backend.baseUrl, "GET", "/outbox", undefined,
                                director);
    const mail = (outbox.body.messages as {
      recipient: string; template: string;
      payload: { activation_password: string } }[])
      .reverse().find((m) => m.template === "Activation"
                             && m.recipient === "nosy@x.net")!;
    const strangerSession = await directLogin(backend.baseUrl, "nosy@x.net",
                                              mail.payload.activation_password);
    await direct(backend.baseUrl, "POST", "/auth/password",
                 { old_password: mail.payload.activation_password,
                   new_password: "fresh-pass-77" }, strangerSession);
    const uiApi = await uiClient("nosy@x.net", "fresh-pass-77");
    const ui = fromFlow(await flows.rateJob(uiApi, job,
                                            [{ criterion: "x", score: 3 }]));
    const rawSession = await directLogin(backend.baseUrl, "nosy@x.net",
                                         "fresh-pass-77");
    const raw = await direct(backend.baseUrl, "POST", "/ratings/jobs", {
      job_id: job, itemized: [{ criterion: "x", score: 3 }] }, rawSession);
    expect(ui).toEqual(fromDirect(raw.status, raw.body));
    expect(ui.ruleId).toBe("BR20");
  });

  it("flow 17: staff appeal their shift rating", async () => {
    const supervisor = await directLogin(backend.baseUrl, USERS.supervisor);
    const shifts = await direct(backend.baseUrl, "GET",
                                `/shifts?date=${backend.dates[0]}`, undefined,
                                supervisor);
    const shift = (shifts.body.shifts as { id: number; staff: number[] }[])[0];
    const mkRating = async () => (await direct(
      backend.baseUrl, "POST", "/ratings/employees",
      { employee_id: shift.staff[0], shift_id: shift.id, score: 2 },
      supervisor)).body.id as number;
    const staffApi = await uiClient(USERS.staff[0]);
    const ui = await flows.appealRating(staffApi, await mkRating(), "unfair");
    const staffSession = await directLogin(backend.baseUrl, USERS.staff[0]);
    const raw = await direct(backend.baseUrl, "POST", "/appeals", {
      rating_id: await mkRating(), reason: "unfair" }, staffSession);
    expect(ui.ok && raw.ok).toBe(true);
    expect(ui.data!.resolution).toBe("pending");
    expect((raw.body as { resolution: string }).resolution).toBe("pending");
  });

  it("flow 18: the director revises an appealed rating", async () => {
    const director = await uiClient(USERS.director);
    const pending = await director.appeals("pending");
    expect(pending.appeals.length).toBeGreaterThanOrEqual(2);
    const [first, second] = pending.appeals;
    const ui = await flows.resolveAppeal(director, first.id, "revised", 4);
    const session = await directLogin(backend.baseUrl, USERS.director);
    const raw = await direct(backend.baseUrl, "POST",
                             `/appeals/${second.id}/resolve`,
                             { decision: "revised", new_score: 4 }, session);
    expect(ui.ok && raw.ok).toBe(true);
    expect(ui.data!.resolution).toBe("revised");
    expect((raw.body as { resolution: string }).resolution).toBe("revised");
  });

  it("flow 19: suspension blocks the account until the window ends", async () => {
    const director = await uiClient(USERS.director);
    const uiTargetSession = await directLogin(backend.baseUrl, USERS.staff[0]);
    const ui = await flows.suspendAccount(
      director, uiTargetSession.account.id, backend.dates[0], backend.dates[6],
      false);
    expect(ui.ok).toBe(true);
    const uiDenied = fromFlow(await flows.login(new OmsApi(backend.baseUrl),
                                                USERS.staff[0], PASSWORD));
    const session = await directLogin(backend.baseUrl, USERS.director);
    const rawTarget = await directLogin(backend.baseUrl, USERS.staff[1]);
    await direct(backend.baseUrl, "POST",
                 `/accounts/${rawTarget.account.id}/suspend`,
                 { start: backend.dates[0], end: backend.dates[6],
                   confirm: true }, session);
    const rawDenied = await direct(backend.baseUrl, "POST", "/auth/login",
                                   { username: USERS.staff[1], password: PASSWORD });
    expect(uiDenied).toEqual(fromDirect(rawDenied.status, rawDenied.body));
    expect(uiDenied.ruleId).toBe("BR2");
  });

  it("flow 20: cash flow report runs and exports the same CSV", async () => {
    const month = backend.dates[0].slice(0, 7);
    const api = await uiClient(USERS.director);
    const ui = await flows.runReport(api, "cash_flow", { month });
    const uiCsv = await flows.exportReport(api, ui.data!.id, "csv");
    const session = await directLogin(backend.baseUrl, USERS.director);
    const raw = await direct(backend.baseUrl, "POST", "/reports/cash_flow",
                             { month }, session);
    const rawCsv = await direct(backend.baseUrl, "POST",
                                `/reports/${raw.body.id}/export`,
                                { format: "csv" }, session);
    expect(ui.ok && raw.ok).toBe(true);
    expect(ui.data!.body).toEqual((raw.body as { body: unknown }).body);
    expect(uiCsv.data!.content).toEqual(
      (rawCsv.body as { content: string }).content);
    expect(uiCsv.data!.content!.startsWith("measure,pence")).toBe(true);
  });

  it("the client layer threw nothing past the API problem type", () => {
    // sanity: flows never raise raw fetch errors in these tests
    expect(ApiProblem.name).toBe("ApiProblem");
  });
});
