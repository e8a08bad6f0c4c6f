/**
 * The actions behind every form in the client, shared by the views and the
 * contract tests. Each flow may short-circuit on a client-side hint (pure
 * convenience), but with hints disabled it forwards everything verbatim and
 * reports the server's decision — the server is the only authority.
 */

import { Account, ApiProblem, Appeal, Order, OmsApi, Premises, PriceBreakdown,
         Rating, Report, ScaleDownProposal, Session, ServiceOrderRequest,
         SheetResult } from "./api.js";
import { firstHint, hint } from "./validation.js";

export interface FlowOutcome<T = unknown> {
  ok: boolean;
  status?: number;
  code?: string;
  ruleId?: string;
  message?: string;
  details?: Record<string, unknown>;
  data?: T;
}

export async function run<T>(action: () => Promise<T>): Promise<FlowOutcome<T>> {
  try {
    return { ok: true, data: await action() };
  } catch (error) {
    if (error instanceof ApiProblem) {
      return {
        ok: false,
        status: error.status,
        code: error.body.code,
        ruleId: error.body.rule_id,
        message: error.body.message,
        details: error.body.details,
      };
    }
    throw error;
  }
}

function clientReject<T>(message: string): FlowOutcome<T> {
  return { ok: false, code: "client_hint", message };
}

export function login(api: OmsApi, username: string,
                      password: string): Promise<FlowOutcome<Session>> {
  const problem = firstHint(
    hint(username.length > 0, "enter your username"),
    hint(password.length > 0, "enter your password"),
  );
  if (problem) return Promise.resolve(clientReject(problem));
  return run(() => api.login(username, password));
}

export function signUp(api: OmsApi, email: string, emailConfirm: string,
                       paymentDetails?: string): Promise<FlowOutcome<Account>> {
  const problem = firstHint(
    hint(email.includes("@"), "that does not look like an email address"),
    hint(email === emailConfirm, "the emails do not match"),
  );
  if (problem) return Promise.resolve(clientReject(problem));
  return run(() => api.createCustomer(email, emailConfirm, paymentDetails));
}

export function quoteService(api: OmsApi, services: string[], date: string,
                             premises: Premises): Promise<FlowOutcome<{
  lines: unknown[]; total_minutes: number; breakdown: PriceBreakdown }>> {
  const problem = firstHint(
    hint(services.length > 0, "pick at least one service"),
    hint(premises.square_feet > 0, "floor area must be positive"),
  );
  if (problem) return Promise.resolve(clientReject(problem));
  return run(() => api.quoteServiceOrder({ services, date, premises }));
}

export function placeServiceOrder(api: OmsApi, request: ServiceOrderRequest):
    Promise<FlowOutcome<Order & { scale_down?: ScaleDownProposal }>> {
  const problem = firstHint(
    hint(request.services.length > 0, "pick at least one service"),
    hint(request.location.length > 0, "where should we clean?"),
    hint(request.payment_method.length > 0, "choose how to pay"),
  );
  if (problem) return Promise.resolve(clientReject(problem));
  return run(() => api.placeServiceOrder(request));
}

export function placeProductOrder(api: OmsApi, lines: { item_id: string; qty: number }[],
                                  date: string, delivery: Record<string, unknown>,
                                  paymentMethod: string): Promise<FlowOutcome<Order>> {
  const problem = firstHint(
    hint(lines.length > 0, "the cart is empty"),
    hint(lines.every((l) => l.qty >= 1), "quantities start at 1"),
    hint(delivery.mode !== "delivery" || Boolean(delivery.location),
         "a delivery needs a location"),
  );
  if (problem) return Promise.resolve(clientReject(problem));
  return run(() => api.placeProductOrder(lines, date, delivery, paymentMethod));
}

export function cancelOrder(api: OmsApi, ref: string): Promise<FlowOutcome<Order>> {
  return run(() => api.cancelOrder(ref));
}

export function rateJob(api: OmsApi, jobId: number,
                        itemized: { criterion: string; score: number }[]):
    Promise<FlowOutcome<Rating>> {
  const problem = firstHint(
    hint(itemized.length > 0, "score at least one item"),
    hint(itemized.every((i) => i.score >= 1 && i.score <= 5),
         "scores run from 1 to 5"),
  );
  if (problem) return Promise.resolve(clientReject(problem));
  return run(() => api.rateJob(jobId, itemized));
}

export function appealRating(api: OmsApi, ratingId: number,
                             reason: string): Promise<FlowOutcome<Appeal>> {
  const problem = hint(reason.trim().length > 0, "say why you are appealing");
  if (problem) return Promise.resolve(clientReject(problem));
  return run(() => api.appealRating(ratingId, reason));
}

export function resolveAppeal(api: OmsApi, appealId: number, decision: string,
                              newScore?: number): Promise<FlowOutcome<Appeal>> {
  const problem = hint(decision !== "revised" || newScore !== undefined,
                       "a revision needs the new score");
  if (problem) return Promise.resolve(clientReject(problem));
  return run(() => api.resolveAppeal(appealId, decision, newScore));
}

export function suspendAccount(api: OmsApi, accountId: number, start: string,
                               end: string, directorAuthorization: boolean):
    Promise<FlowOutcome<Account>> {
  const problem = firstHint(
    hint(Boolean(start && end), "both dates are needed"),
    hint(!start || !end || start <= end, "the window ends before it starts"),
  );
  if (problem) return Promise.resolve(clientReject(problem));
  return run(() => api.suspendAccount(accountId, start, end, directorAuthorization));
}

export function createEmployee(api: OmsApi, fields: {
  first_name: string; surname: string; role: string; department: string;
  recruitment_no: string; director_authorization?: boolean;
}): Promise<FlowOutcome<Account>> {
  const problem = hint(
    Boolean(fields.first_name && fields.surname && fields.recruitment_no),
    "name and recruitment number are required");
  if (problem) return Promise.resolve(clientReject(problem));
  return run(() => api.createEmployee(fields));
}

export function runReport(api: OmsApi, category: string,
                          params: Record<string, unknown>): Promise<FlowOutcome<Report>> {
  return run(() => api.runReport(category, params));
}

export function exportReport(api: OmsApi, reportId: number, format: string,
                             emailTo?: string): Promise<FlowOutcome<{
  format: string; content?: string; queued_message?: number }>> {
  return run(() => api.exportReport(reportId, format, emailTo));
}

export function populateAttendance(api: OmsApi, shiftId: number, rows: {
  employee_id: number; reporting_time: string; finishing_time: string;
}[]): Promise<FlowOutcome<SheetResult>> {
  const problem = hint(
    rows.every((r) => r.reporting_time <= r.finishing_time),
    "finishing time is before reporting time");
  if (problem) return Promise.resolve(clientReject(problem));
  return run(() => api.populateAttendance(shiftId, rows));
}

export function populateInventory(api: OmsApi, shiftId: number, lines: {
  item_id: string; issued: number; returned: number;
}[], reopen = false): Promise<FlowOutcome<SheetResult>> {
  const problem = hint(
    lines.every((l) => l.returned <= l.issued),
    "returned cannot exceed issued");
  if (problem) return Promise.resolve(clientReject(problem));
  return run(() => api.populateInventory(shiftId, lines, reopen));
}
