/**
 * Supervisor sheets: pick one of your shifts, enter attendance times or
 * inventory amounts, see the server-computed read-back (used, standing,
 * wages), and only then confirm. Past sheets are recallable.
 */

import { InventoryLine, OmsApi, Shift } from "../api.js";
import { button, el, field, money, notice, numberInput, page, table,
         textInput } from "../dom.js";
import * as flows from "../flows.js";

export function supervisorView(api: OmsApi, today: string): HTMLElement {
  const root = page("Supervisor");
  const picker = el("div", { class: "shift-picker" });
  const work = el("div", { class: "sheet-work" });
  root.append(picker, work);

  const date = textInput("sheet_date", today);
  picker.append(field("Shift date", date),
    button("Load shifts", () => void loadShifts(), { class: "load-shifts" }));

  async function loadShifts(): Promise<void> {
    const { shifts } = await api.shifts(date.value);
    work.replaceChildren();
    if (!shifts.length) {
      work.append(notice("info", "no shifts planned that day"));
      return;
    }
    for (const shift of shifts) {
      const row = el("div", { class: "shift-row" },
        el("span", {}, `Shift ${shift.id} ${shift.start}-${shift.end}, `
          + `crew ${shift.staff.join(", ")} `));
      row.append(
        button("Attendance sheet", () => renderAttendance(api, work, shift),
               { class: "open-attendance", "data-shift": String(shift.id) }),
        button("Inventory sheet", () => renderInventory(api, work, shift),
               { class: "open-inventory", "data-shift": String(shift.id) }),
        button("Recall past sheets", () => void recall(api, work, shift),
               { class: "recall-sheets" }));
      work.append(row);
    }
  }

  return root;
}

function renderAttendance(api: OmsApi, mount: HTMLElement, shift: Shift): void {
  const form = el("form", { class: "attendance-form" });
  const rows = shift.staff.map((employeeId) => {
    const reporting = textInput(`reporting_${employeeId}`, shift.start);
    const finishing = textInput(`finishing_${employeeId}`, shift.end);
    form.append(el("fieldset", {},
      el("legend", {}, `Employee ${employeeId}`),
      field("Reported at", reporting), field("Finished at", finishing)));
    return { employeeId, reporting, finishing };
  });
  const slot = el("div", { class: "problems" });
  form.append(button("Save sheet and compute wages", async () => {
    const outcome = await flows.populateAttendance(api, shift.id, rows.map((r) => ({
      employee_id: r.employeeId,
      reporting_time: r.reporting.value,
      finishing_time: r.finishing.value,
    })));
    if (!outcome.ok) {
      slot.replaceChildren(notice("error",
        `${outcome.message} ${outcome.ruleId ? `(${outcome.ruleId})` : ""}`));
      return;
    }
    slot.replaceChildren(
      notice("success", "sheet saved; wages computed"),
      table(["employee", "minutes", "wage"],
            outcome.data!.wages!.map((w) => [w.employee_id, w.minutes,
                                             money(w.wage)])));
  }, { class: "save-attendance" }), slot);
  mount.replaceChildren(el("h3", {}, `Attendance for shift ${shift.id}`), form);
}

function renderInventory(api: OmsApi, mount: HTMLElement, shift: Shift): void {
  const form = el("form", { class: "inventory-form" });
  const lines: { item: HTMLInputElement; issued: HTMLInputElement;
                 returned: HTMLInputElement }[] = [];
  const addLine = () => {
    const item = textInput("item_id", "", { placeholder: "item id" });
    const issued = numberInput("issued", 0);
    const returned = numberInput("returned", 0);
    lines.push({ item, issued, returned });
    form.prepend(el("fieldset", {}, el("legend", {}, `Line ${lines.length}`),
      field("Item", item), field("Issued", issued), field("Returned", returned)));
  };
  addLine();
  const slot = el("div", { class: "problems" });
  const readback = el("div", { class: "readback" });

  const collect = (): InventoryLine[] => lines
    .filter((l) => l.item.value)
    .map((l) => ({ item_id: l.item.value, issued: Number(l.issued.value),
                   returned: Number(l.returned.value) }));

  form.append(
    button("Add line", addLine, { class: "add-line" }),
    button("Check figures", async () => {
      const outcome = await flows.run(() => api.previewInventory(collect()));
      if (!outcome.ok) {
        slot.replaceChildren(notice("error", outcome.message ?? "cannot preview"));
        return;
      }
      readback.replaceChildren(
        el("h4", {}, "The system works out:"),
        table(["item", "issued", "returned", "used", "standing after"],
              outcome.data!.lines.map((l) => [l.item_id, l.issued, l.returned,
                                              l.used ?? 0, l.standing ?? "?"])));
    }, { class: "preview-inventory" }),
    button("Confirm and save", async () => {
      const outcome = await flows.populateInventory(api, shift.id, collect());
      if (!outcome.ok) {
        slot.replaceChildren(notice("error",
          `${outcome.message} ${outcome.ruleId ? `(${outcome.ruleId})` : ""}`));
        return;
      }
      const events = outcome.data!.reorder_events ?? [];
      slot.replaceChildren(notice("success",
        `sheet saved${events.length ? "; replenishment triggered" : ""}`));
    }, { class: "save-inventory" }),
    slot, readback);
  mount.replaceChildren(el("h3", {}, `Inventory for shift ${shift.id}`), form);
}

async function recall(api: OmsApi, mount: HTMLElement, shift: Shift): Promise<void> {
  const slot = el("div", { class: "recalled" });
  for (const kind of ["attendance", "inventory"]) {
    const outcome = await flows.run(() => api.recallSheet(kind, shift.id));
    slot.append(outcome.ok
      ? el("pre", {}, JSON.stringify(outcome.data, null, 2))
      : notice("info", `${kind}: ${outcome.message}`));
  }
  mount.replaceChildren(el("h3", {}, `Past sheets for shift ${shift.id}`), slot);
}
