/**
 * Typed client for the management-service JSON API.
 *
 * Every number shown in the UI comes straight out of these responses; the
 * client never recomputes a price, wage, or score. Errors arrive as
 * `{code, rule_id?, message, details}` and are rethrown as ApiProblem so
 * views can render the server's decision verbatim.
 */

export interface ErrorBody {
  code: string;
  rule_id?: string;
  message: string;
  details: Record<string, unknown>;
}

export class ApiProblem extends Error {
  constructor(public status: number, public body: ErrorBody) {
    super(body.message);
  }
}

export interface Session {
  token: string;
  csrf_token: string;
  restricted: boolean;
  account: Account;
}

export interface Account {
  id: number;
  username: string;
  role: string;
  state: string;
  email: string;
  department?: string;
  suspension?: { start: string; end: string } | null;
}

export interface PriceBreakdown {
  labor: number;
  products: number;
  margin: number;
  tax: number;
  delivery: number;
  total: number;
}

export interface MenuEntry {
  item_id: string;
  name: string;
  unit_price: number;
  supplier_id: string;
  available_units: number;
  display_price?: number;
  promo?: { old_price: number; promo_price: number };
  hours_factor_pct?: number;
}

export interface Menu {
  date: string;
  audience: string;
  entries: MenuEntry[];
  notice?: string;
}

export interface Premises {
  square_feet: number;
  rooms: number;
  floors: number;
  surface_kind: string;
  area_kind: string;
}

export interface ServiceOrderRequest {
  services: string[];
  date: string;
  time: string;
  location: string;
  premises: Premises;
  payment_method: string;
}

export interface Order {
  id: number;
  kind?: string;
  status: string;
  date: string;
  breakdown: PriceBreakdown;
  services?: { item_id: string; name: string; minutes: number }[];
  lines?: { item_id: string; name: string; qty: number; unit_price: number }[];
  location?: string;
  time?: string;
}

export interface ScaleDownProposal {
  services: string[];
  total_minutes: number;
  reason: string;
}

export interface UnratedJob {
  job_id: number;
  date: string;
  services: string[];
}

export interface Rating {
  id: number;
  kind: string;
  score: number;
  state: string;
  revised_score?: number | null;
  date: string;
  itemized: { criterion: string; score: number }[];
}

export interface Appeal {
  id: number;
  rating_id: number;
  employee_id: number;
  reason: string;
  resolution: string;
  new_score?: number | null;
}

export interface Report {
  id: number;
  category: string;
  generated_at: string;
  body: { columns: string[]; rows: unknown[][] };
}

export interface Shift {
  id: number;
  date: string;
  start: string;
  end: string;
  staff: number[];
  supervisor_id: number;
  capacity_minutes: number;
  used_minutes?: number;
}

export interface SheetResult {
  sheet: { shift_id: number; lines?: InventoryLine[]; rows?: unknown[]; date: string };
  wages?: { employee_id: number; minutes: number; wage: number }[];
  usage_cost?: { item_id: string; cost: number }[];
  reorder_events?: unknown[];
}

export interface InventoryLine {
  item_id: string;
  issued: number;
  returned: number;
  used?: number;
  standing?: number | null;
}

export interface Draft {
  payload: Record<string, unknown>;
  saved_at: string;
}

export class OmsApi {
  constructor(
    public baseUrl: string,
    private session: { token: string; csrf: string } | null = null,
  ) {}

  attach(token: string, csrf: string): void {
    this.session = { token, csrf };
  }

  detach(): void {
    this.session = null;
  }

  get authenticated(): boolean {
    return this.session !== null;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.session) {
      headers.Authorization = `Bearer ${this.session.token}`;
      if (method !== "GET") headers["X-CSRF-Token"] = this.session.csrf;
    }
    const response = await fetch(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json().catch(() => ({}));
    if (!response.ok) {
      throw new ApiProblem(response.status, payload as ErrorBody);
    }
    return payload as T;
  }

  // auth
  login(username: string, password: string): Promise<Session> {
    return this.request("POST", "/auth/login", { username, password });
  }
  logout(): Promise<void> {
    return this.request("POST", "/auth/logout", {});
  }
  changePassword(oldPassword: string, newPassword: string): Promise<unknown> {
    return this.request("POST", "/auth/password", {
      old_password: oldPassword,
      new_password: newPassword,
    });
  }

  // accounts
  createCustomer(email: string, emailConfirm: string, paymentDetails?: string) {
    return this.request<Account>("POST", "/accounts", {
      kind: "customer",
      email,
      email_confirm: emailConfirm,
      payment_details: paymentDetails,
    });
  }
  createEmployee(fields: {
    first_name: string;
    surname: string;
    role: string;
    department: string;
    recruitment_no: string;
    director_authorization?: boolean;
  }) {
    return this.request<Account>("POST", "/accounts", { kind: "employee", ...fields });
  }
  idleAccounts() {
    return this.request<{ accounts: Account[] }>("GET", "/accounts/idle");
  }
  modifyAccount(id: number, fields: {
    new_role?: string;
    new_department?: string;
    director_authorization?: boolean;
  }) {
    return this.request<Account>("PATCH", `/accounts/${id}`, fields);
  }
  suspendAccount(id: number, start: string, end: string, directorAuthorization = false) {
    return this.request<Account>("POST", `/accounts/${id}/suspend`, {
      start,
      end,
      director_authorization: directorAuthorization,
      confirm: true,
    });
  }
  deleteAccount(id: number, directorAuthorization = false) {
    return this.request("DELETE", `/accounts/${id}`, {
      director_authorization: directorAuthorization,
    });
  }

  // catalog
  menu(date: string, audience: string): Promise<Menu> {
    return this.request("GET", `/menu?date=${date}&audience=${audience}`);
  }
  modifyMenu(date: string, audience: string, changes: unknown[]) {
    return this.request<Menu>("PUT", "/menu", { date, audience, changes });
  }
  promotions(supplier?: string) {
    const query = supplier ? `?supplier=${encodeURIComponent(supplier)}` : "";
    return this.request<{ promotions: unknown[] }>("GET", `/promotions${query}`);
  }
  definePromotion(fields: {
    name: string;
    start: string;
    end: string;
    item_prices: { item_id: string; promo_price: number }[];
  }) {
    return this.request("POST", "/promotions", fields);
  }

  // ordering
  quoteServiceOrder(request: Omit<ServiceOrderRequest, "time" | "location" | "payment_method">) {
    return this.request<{ lines: unknown[]; total_minutes: number; breakdown: PriceBreakdown }>(
      "POST", "/orders/services/quote", request);
  }
  placeServiceOrder(request: ServiceOrderRequest) {
    return this.request<Order & { scale_down?: ScaleDownProposal }>(
      "POST", "/orders/services", request);
  }
  quoteProductOrder(lines: { item_id: string; qty: number }[], date: string, delivery: unknown) {
    return this.request<{ breakdown: PriceBreakdown }>(
      "POST", "/orders/products/quote", { lines, date, delivery });
  }
  placeProductOrder(lines: { item_id: string; qty: number }[], date: string,
                    delivery: unknown, paymentMethod: string) {
    return this.request<Order>("POST", "/orders/products", {
      lines, date, delivery, payment_method: paymentMethod,
    });
  }
  orders(kind: string) {
    return this.request<{ orders: Order[] }>("GET", `/orders?kind=${kind}`);
  }
  cancelOrder(ref: string) {
    return this.request<Order>("POST", `/orders/${ref}/cancel`, {});
  }
  amendOrder(ref: string, fields: Record<string, unknown>) {
    return this.request<Order>("POST", `/orders/${ref}/amend`, fields);
  }
  setOrderStatus(ref: string, status: string) {
    return this.request<Order>("POST", `/orders/${ref}/status`, { status });
  }
  saveDraft(payload: Record<string, unknown>) {
    return this.request<Draft>("PUT", "/orders/draft", { payload });
  }
  recoverDraft() {
    return this.request<{ draft: Draft | null }>("GET", "/orders/recover");
  }
  deliveryTimes(date: string) {
    return this.request<{ date: string; times: string[] }>(
      "GET", `/delivery-times?date=${date}`);
  }

  // ratings and appeals
  unratedJobs() {
    return this.request<{ jobs: UnratedJob[]; notice?: string }>(
      "GET", "/ratings/unrated-jobs");
  }
  rateJob(jobId: number, itemized: { criterion: string; score: number }[]) {
    return this.request<Rating>("POST", "/ratings/jobs", {
      job_id: jobId, itemized,
    });
  }
  saveRatingDraft(jobId: number, form: Record<string, unknown>) {
    return this.request("PUT", `/ratings/drafts/${jobId}`, { form });
  }
  loadRatingDraft(jobId: number) {
    return this.request<{ draft: { form: Record<string, unknown> } | null }>(
      "GET", `/ratings/drafts/${jobId}`);
  }
  rateEmployee(employeeId: number, shiftId: number, score: number) {
    return this.request<Rating>("POST", "/ratings/employees", {
      employee_id: employeeId, shift_id: shiftId, score,
    });
  }
  employeeRatings(employeeId: number) {
    return this.request<{ ratings: Rating[] }>(
      "GET", `/ratings/employees/${employeeId}`);
  }
  rankings(start: string, end: string) {
    return this.request<{ ranking: { employee_id: number; value: number | null }[] }>(
      "GET", `/rankings?start=${start}&end=${end}`);
  }
  appeals(resolution?: string) {
    const query = resolution ? `?resolution=${resolution}` : "";
    return this.request<{ appeals: Appeal[] }>("GET", `/appeals${query}`);
  }
  appealRating(ratingId: number, reason: string) {
    return this.request<Appeal>("POST", "/appeals", {
      rating_id: ratingId, reason,
    });
  }
  resolveAppeal(appealId: number, decision: string, newScore?: number) {
    return this.request<Appeal>("POST", `/appeals/${appealId}/resolve`, {
      decision, new_score: newScore,
    });
  }

  // sheets and shifts
  shifts(date: string) {
    return this.request<{ shifts: Shift[] }>("GET", `/shifts?date=${date}`);
  }
  rotor() {
    return this.request<{ shifts: Shift[] }>("GET", "/rotors");
  }
  populateAttendance(shiftId: number, rows: {
    employee_id: number; reporting_time: string; finishing_time: string;
  }[]) {
    return this.request<SheetResult>("POST", "/sheets/attendance", {
      shift_id: shiftId, rows,
    });
  }
  previewInventory(lines: InventoryLine[]) {
    return this.request<{ lines: InventoryLine[] }>(
      "POST", "/sheets/inventory/preview", { lines });
  }
  populateInventory(shiftId: number, lines: InventoryLine[], reopen = false) {
    return this.request<SheetResult>("POST", "/sheets/inventory", {
      shift_id: shiftId, lines, reopen,
    });
  }
  recallSheet(kind: string, shiftId: number) {
    return this.request<Record<string, unknown>>(
      "GET", `/sheets/${kind}/${shiftId}`);
  }

  // reports
  runReport(category: string, params: Record<string, unknown>) {
    return this.request<Report>("POST", `/reports/${category}`, params);
  }
  reportHistory() {
    return this.request<{ reports: Report[] }>("GET", "/reports/history");
  }
  exportReport(reportId: number, format: string, emailTo?: string) {
    return this.request<{ format: string; content?: string; queued_message?: number }>(
      "POST", `/reports/${reportId}/export`, { format, email_to: emailTo });
  }

  // share
  share(resourceKind: string, resourceId: string, target: string) {
    return this.request("POST", "/share", {
      resource_kind: resourceKind, resource_id: resourceId, target,
    });
  }
}
