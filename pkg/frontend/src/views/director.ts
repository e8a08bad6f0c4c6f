/**
 * Director console: run and export reports, manage accounts (create,
 * promote, suspend with an explicit window, delete), and resolve appeals.
 * Administrator gets the same console; their account changes carry the
 * captured director authorization flag.
 */

import { Account, OmsApi, Report } from "../api.js";
import { button, confirmBar, el, field, money, notice, page, select, table,
         textInput } from "../dom.js";
import * as flows from "../flows.js";

export function directorView(api: OmsApi, me: Account, today: string): HTMLElement {
  const root = page("Director console");
  const reports = el("div", { class: "reports-pane" });
  const accounts = el("div", { class: "accounts-pane" });
  const appeals = el("div", { class: "appeals-pane" });
  root.append(reports, accounts, appeals);
  renderReports(api, reports, today);
  void renderAccounts(api, accounts, me);
  void renderAppeals(api, appeals);
  return root;
}

function renderReports(api: OmsApi, mount: HTMLElement, today: string): void {
  mount.replaceChildren(el("h3", {}, "Reports"));
  const category = select("category", [
    ["cash_flow", "Cash flow (month)"],
    ["productivity", "Productivity (week)"],
    ["inventory_summary", "Inventory summary (day)"],
    ["adhoc", "Ad hoc (ledger)"],
  ]);
  const param = textInput("param", today.slice(0, 7),
                          { placeholder: "2026-01 / 2026-W02 / 2026-01-05 / orders" });
  const output = el("div", { class: "report-output" });
  const historyMount = el("div", { class: "report-history" });

  const runButton = button("Run report", async () => {
    const value = param.value;
    const params =
      category.value === "cash_flow" ? { month: value }
      : category.value === "productivity" ? { week: value }
      : category.value === "inventory_summary" ? { day: value }
      : { descriptor: { ledger: value } };
    const outcome = await flows.runReport(api, category.value, params);
    if (!outcome.ok) {
      output.replaceChildren(notice("error", outcome.message ?? "report failed"));
      return;
    }
    renderReportBody(api, output, outcome.data!);
    void renderHistory();
  }, { class: "run-report" });

  async function renderHistory(): Promise<void> {
    const { reports } = await api.reportHistory();
    historyMount.replaceChildren(el("h4", {}, "Past runs (six months)"));
    if (!reports.length) {
      historyMount.append(notice("info", "no reports run yet"));
      return;
    }
    for (const report of reports) {
      historyMount.append(button(
        `#${report.id} ${report.category} (${report.generated_at.slice(0, 10)})`,
        () => renderReportBody(api, output, report),
        { class: "history-entry" }));
    }
  }

  mount.append(field("Category", category), field("Period / ledger", param),
               runButton, output, historyMount);
  void renderHistory();
}

function renderReportBody(api: OmsApi, mount: HTMLElement, report: Report): void {
  mount.replaceChildren(
    el("h4", {}, `${report.category} #${report.id}`),
    el("p", {}, `generated ${report.generated_at}`),
    table(report.body.columns,
          report.body.rows.map((row) => row.map((cell) =>
            cell == null ? null : (cell as string | number)))),
    button("Export CSV", async () => {
      const result = await api.exportReport(report.id, "csv");
      const blob = new Blob([result.content ?? ""], { type: "text/csv" });
      const link = el("a", { href: URL.createObjectURL(blob),
                             download: `report-${report.id}.csv` }, "download ready");
      mount.append(link);
      link.click();
    }, { class: "export-csv" }),
    button("Print view", () => window.print(), { class: "export-print" }),
    button("Email it to me", async () => {
      await api.exportReport(report.id, "email");
      mount.append(notice("success", "export queued for delivery"));
    }, { class: "export-email" }),
  );
}

async function renderAccounts(api: OmsApi, mount: HTMLElement,
                              me: Account): Promise<void> {
  mount.replaceChildren(el("h3", {}, "Accounts"));

  // director authorization capture: mandatory context for administrators
  const authorization = el("input", { type: "checkbox", name: "director_authorization" });
  const authorizationField = el("label", { class: "field authorization" },
    el("span", {}, "Change was authorized or requested by the director"),
    authorization);
  if (me.role === "administrator") mount.append(authorizationField);
  const authorized = () => me.role !== "administrator"
    ? false : (authorization as HTMLInputElement).checked;

  const first = textInput("first_name", "");
  const last = textInput("surname", "");
  const role = select("role", [["cleaning_staff", "Cleaning staff"],
                               ["supervisor", "Supervisor"],
                               ["administrator", "Administrator"]]);
  const department = textInput("department", "operations");
  const recruitment = textInput("recruitment_no", "");
  const slot = el("div", { class: "problems" });
  mount.append(
    el("h4", {}, "Create employee"),
    field("First name", first), field("Surname", last), field("Role", role),
    field("Department", department), field("Recruitment number", recruitment),
    button("Create account", async () => {
      const outcome = await flows.createEmployee(api, {
        first_name: first.value, surname: last.value, role: role.value,
        department: department.value, recruitment_no: recruitment.value,
        director_authorization: authorized(),
      });
      slot.replaceChildren(outcome.ok
        ? notice("success",
            `account ${(outcome.data as Account).username} created; `
            + "it waits in the idle pane until first login")
        : notice("error", `${outcome.message} `
            + `${outcome.ruleId ? `(${outcome.ruleId})` : ""}`));
      void renderIdlePane();
    }, { class: "create-employee" }),
    slot);

  const idlePane = el("div", { class: "idle-pane" });
  mount.append(idlePane);
  async function renderIdlePane(): Promise<void> {
    const { accounts } = await api.idleAccounts();
    idlePane.replaceChildren(el("h4", {}, "Idle accounts (awaiting activation)"));
    idlePane.append(accounts.length
      ? table(["id", "username", "role"],
              accounts.map((a) => [a.id, a.username, a.role]))
      : notice("info", "none"));
  }
  void renderIdlePane();

  const target = textInput("target_id", "", { placeholder: "account id" });
  const newRole = select("new_role", [["cleaning_staff", "Cleaning staff"],
                                      ["supervisor", "Supervisor"]]);
  const start = textInput("suspend_start", "", { placeholder: "2026-01-10" });
  const end = textInput("suspend_end", "", { placeholder: "2026-01-17" });
  const actionSlot = el("div", { class: "problems" });
  mount.append(
    el("h4", {}, "Modify / suspend / delete"),
    field("Account id", target), field("New role", newRole),
    button("Change role", async () => {
      const outcome = await flows.run(() => api.modifyAccount(
        Number(target.value), { new_role: newRole.value,
                                director_authorization: authorized() }));
      actionSlot.replaceChildren(outcome.ok
        ? notice("success", "role updated")
        : notice("error", `${outcome.message} (${outcome.ruleId ?? outcome.code})`));
    }, { class: "modify-role" }),
    field("Suspension start", start), field("Suspension end", end),
    button("Suspend", () => {
      mount.append(confirmBar(
        `Suspend account ${target.value} from ${start.value} to ${end.value}?`,
        async () => {
          const outcome = await flows.suspendAccount(
            api, Number(target.value), start.value, end.value, authorized());
          actionSlot.replaceChildren(outcome.ok
            ? notice("success", "account suspended for the window")
            : notice("error", `${outcome.message} (${outcome.ruleId ?? outcome.code})`));
        },
        () => undefined));
    }, { class: "suspend-account" }),
    button("Delete account", () => {
      mount.append(confirmBar(
        `Delete account ${target.value}? Login is gone for good.`,
        async () => {
          const outcome = await flows.run(() => api.deleteAccount(
            Number(target.value), authorized()));
          actionSlot.replaceChildren(outcome.ok
            ? notice("success", "account deleted (audit trail kept)")
            : notice("error", `${outcome.message} (${outcome.ruleId ?? outcome.code})`));
        },
        () => undefined));
    }, { class: "delete-account" }),
    actionSlot);
}

async function renderAppeals(api: OmsApi, mount: HTMLElement): Promise<void> {
  const { appeals } = await api.appeals("pending");
  mount.replaceChildren(el("h3", {}, "Appeals awaiting a decision"));
  if (!appeals.length) {
    mount.append(notice("info", "none pending"));
    return;
  }
  for (const appeal of appeals) {
    const row = el("div", { class: "appeal-row" },
      el("span", {}, `Appeal ${appeal.id} on rating ${appeal.rating_id} `
        + `by employee ${appeal.employee_id}: "${appeal.reason}" `));
    const score = select("new_score", [["1", "1"], ["2", "2"], ["3", "3"],
                                       ["4", "4"], ["5", "5"]]);
    row.append(
      button("Uphold original", async () => {
        await flows.resolveAppeal(api, appeal.id, "upheld");
        void renderAppeals(api, mount);
      }, { class: "uphold-appeal" }),
      field("Revised score", score),
      button("Revise", async () => {
        await flows.resolveAppeal(api, appeal.id, "revised", Number(score.value));
        void renderAppeals(api, mount);
      }, { class: "revise-appeal" }));
    mount.append(row);
  }
}

export function formatMoney(pence: number): string {
  return money(pence);
}
