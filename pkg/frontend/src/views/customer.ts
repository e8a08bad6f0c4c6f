/**
 * Customer dashboard: the one-off service wizard (with draft recovery and
 * scale-down acceptance), order history, and the rating checklist with
 * save-for-later and a printable form.
 */

import { Menu, OmsApi, Premises, UnratedJob } from "../api.js";
import { button, confirmBar, el, field, money, notice, numberInput, page,
         select, table, textInput } from "../dom.js";
import * as flows from "../flows.js";

interface WizardState {
  step: number;
  date: string;
  services: string[];
  premises: Premises;
  time: string;
  location: string;
  payment_method: string;
}

const SURFACES: [string, string][] = [["carpet", "Carpet"], ["hardwood", "Hardwood"],
                                      ["tile", "Tile"], ["stone", "Stone"]];
const AREAS: [string, string][] = [["room", "Rooms"], ["hall", "Hall"],
                                   ["kitchen", "Kitchen"], ["bathroom", "Bathroom"],
                                   ["office", "Office"], ["outdoor", "Outdoor"]];

function freshState(date: string): WizardState {
  return {
    step: 1, date, services: [],
    premises: { square_feet: 500, rooms: 2, floors: 1,
                surface_kind: "carpet", area_kind: "room" },
    time: "10:00", location: "", payment_method: "card",
  };
}

export function customerView(api: OmsApi, defaultDate: string): HTMLElement {
  const root = page("Customer");
  const wizardMount = el("div", { class: "wizard-mount" });
  const ratingMount = el("div", { class: "rating-mount" });
  const historyMount = el("div", { class: "history-mount" });
  root.append(wizardMount, ratingMount, historyMount);

  void renderRecoveryBanner(api, wizardMount, defaultDate);
  void renderRatingChecklist(api, ratingMount);
  void renderHistory(api, historyMount);
  return root;
}

async function renderRecoveryBanner(api: OmsApi, mount: HTMLElement,
                                    defaultDate: string): Promise<void> {
  const { draft } = await api.recoverDraft();
  mount.replaceChildren();
  if (draft && draft.payload && draft.payload["kind"] === "service") {
    const banner = el("div", { class: "recovery-banner", role: "status" },
      el("span", {}, "You have an unfinished order from earlier."));
    banner.append(button("Resume order", () => {
      const payload = draft.payload as Partial<WizardState> & { step?: number };
      const state = { ...freshState(defaultDate), ...payload,
                      step: payload.step ?? 1 };
      mount.replaceChildren(renderWizard(api, mount, state, defaultDate));
    }, { class: "resume-draft" }));
    banner.append(button("Discard", async () => {
      await api.saveDraft({});
      mount.replaceChildren(startButton(api, mount, defaultDate));
    }, { class: "discard-draft" }));
    mount.append(banner, startButton(api, mount, defaultDate));
    return;
  }
  mount.append(startButton(api, mount, defaultDate));
}

function startButton(api: OmsApi, mount: HTMLElement, defaultDate: string): HTMLElement {
  return button("Book a clean", () => {
    mount.replaceChildren(renderWizard(api, mount, freshState(defaultDate), defaultDate));
  }, { class: "start-wizard" });
}

function renderWizard(api: OmsApi, mount: HTMLElement, state: WizardState,
                      defaultDate: string): HTMLElement {
  const wizard = el("div", { class: "wizard", "data-step": String(state.step) });
  const problemSlot = el("div", { class: "problems" });

  const save = () => void api.saveDraft({ kind: "service", ...state });

  const cancelButton = button("Cancel order", () => {
    wizard.append(confirmBar(
      "Abandon this order? Nothing has been booked.",
      async () => {
        await api.saveDraft({});
        mount.replaceChildren(startButton(api, mount, defaultDate));
      },
      () => undefined));
  }, { class: "wizard-cancel" });

  const rerender = () => {
    save();
    mount.replaceChildren(renderWizard(api, mount, state, defaultDate));
  };

  const steps: Record<number, () => HTMLElement | Promise<HTMLElement>> = {
    1: async () => {
      const menu: Menu = await api.menu(state.date, "services");
      const list = el("fieldset", {}, el("legend", {}, "Pick your services"));
      for (const entry of menu.entries) {
        const box = el("input", { type: "checkbox", name: "service",
                                  value: entry.item_id });
        if (state.services.includes(entry.item_id)) box.setAttribute("checked", "");
        box.addEventListener("change", () => {
          state.services = state.services.includes(entry.item_id)
            ? state.services.filter((s) => s !== entry.item_id)
            : [...state.services, entry.item_id];
        });
        list.append(el("label", { class: "service-option" }, box,
          el("span", {}, `${entry.name} (${money(entry.display_price ?? entry.unit_price)} materials)`)));
      }
      const dateInput = textInput("date", state.date);
      dateInput.addEventListener("change", () => { state.date = dateInput.value; });
      return el("div", {}, field("Service date", dateInput), list,
        nextButton(() => state.services.length > 0 || "pick at least one service"));
    },
    2: () => {
      const sqft = numberInput("square_feet", state.premises.square_feet);
      const rooms = numberInput("rooms", state.premises.rooms);
      const floors = numberInput("floors", state.premises.floors);
      const surface = select("surface_kind", SURFACES, state.premises.surface_kind);
      const area = select("area_kind", AREAS, state.premises.area_kind);
      const sync = () => {
        state.premises = {
          square_feet: Number(sqft.value), rooms: Number(rooms.value),
          floors: Number(floors.value), surface_kind: surface.value,
          area_kind: area.value,
        };
      };
      for (const input of [sqft, rooms, floors, surface, area]) {
        input.addEventListener("change", sync);
      }
      return el("div", {},
        el("p", {}, "Describe the premises so we can size the job."),
        field("Floor area (square feet)", sqft), field("Rooms", rooms),
        field("Floors", floors), field("Surface", surface), field("Area type", area),
        nextButton(() => true));
    },
    3: () => {
      const time = textInput("time", state.time);
      const location = textInput("location", state.location,
                                 { placeholder: "street address" });
      time.addEventListener("change", () => { state.time = time.value; });
      location.addEventListener("change", () => { state.location = location.value; });
      return el("div", {}, field("Preferred time", time),
        field("Where", location), nextButton(() => true));
    },
    4: async () => {
      const outcome = await flows.quoteService(api, state.services, state.date,
                                               state.premises);
      if (!outcome.ok) {
        return el("div", {}, notice("error", outcome.message ?? "cannot quote"),
          backButton());
      }
      const quote = outcome.data!;
      const breakdown = quote.breakdown;
      return el("div", { class: "quote" },
        el("p", {}, `Estimated labor: ${quote.total_minutes} minutes.`),
        table(["component", "amount"], [
          ["labor", money(breakdown.labor)],
          ["products", money(breakdown.products)],
          ["margin", money(breakdown.margin)],
          ["tax", money(breakdown.tax)],
          ["total", money(breakdown.total)],
        ]),
        backButton(), nextButton(() => true, "Looks right"));
    },
    5: () => {
      const method = select("payment_method",
        [["card", "Card"], ["cash", "Cash on the day"]], state.payment_method);
      method.addEventListener("change", () => { state.payment_method = method.value; });
      return el("div", {}, field("How will you pay?", method),
        backButton(), nextButton(() => true, "Review"));
    },
    6: () => el("div", { class: "confirm-step" },
      el("p", {}, `Confirm: ${state.services.join(", ")} on ${state.date} `
        + `at ${state.time}, ${state.location || "(no address yet)"}.`),
      backButton(),
      button("Confirm order", () => void submit(), { class: "wizard-confirm" })),
  };

  function nextButton(check: () => true | string, label = "Next"): HTMLElement {
    return button(label, () => {
      const verdict = check();
      if (verdict !== true) {
        problemSlot.replaceChildren(notice("error", verdict));
        return;
      }
      state.step += 1;
      rerender();
    }, { class: "wizard-next" });
  }

  function backButton(): HTMLElement {
    return button("Back", () => { state.step -= 1; rerender(); },
                  { class: "wizard-back" });
  }

  async function submit(proposal?: string[]): Promise<void> {
    const request = {
      services: proposal ?? state.services, date: state.date, time: state.time,
      location: state.location, premises: state.premises,
      payment_method: state.payment_method,
    };
    const outcome = await flows.placeServiceOrder(api, request);
    problemSlot.replaceChildren();
    if (outcome.ok && outcome.data && "scale_down" in outcome.data
        && outcome.data.scale_down) {
      const plan = outcome.data.scale_down;
      const offer = el("div", { class: "scale-down", role: "alertdialog" },
        notice("info", `We cannot fit the whole job that day (${plan.reason}). `
          + `We can do: ${plan.services.join(", ")}.`));
      offer.append(button("Accept reduced job", () => void submit(plan.services),
                          { class: "accept-scale-down" }));
      offer.append(button("Decline", () => offer.remove(),
                          { class: "decline-scale-down" }));
      problemSlot.append(offer);
      return;
    }
    if (!outcome.ok) {
      problemSlot.append(notice("error",
        `${outcome.message} ${outcome.ruleId ? `(${outcome.ruleId})` : ""}`));
      return;
    }
    await api.saveDraft({});
    const order = outcome.data!;
    mount.replaceChildren(
      notice("success", `Order ${order.id} confirmed: ${money(order.breakdown.total)} `
        + `— receipt is on its way.`),
      startButton(api, mount, state.date));
  }

  const body = steps[state.step] ?? steps[1];
  const rendered = body();
  const slot = el("div", { class: "step-body" }, "Loading...");
  Promise.resolve(rendered).then((content) => slot.replaceChildren(content));
  wizard.append(el("h3", {}, `Step ${state.step} of 6`), slot, problemSlot,
                cancelButton);
  return wizard;
}

async function renderRatingChecklist(api: OmsApi, mount: HTMLElement): Promise<void> {
  const listing = await api.unratedJobs();
  mount.replaceChildren(el("h3", {}, "Rate a finished job"));
  if (!listing.jobs.length) {
    mount.append(notice("info", listing.notice ?? "there are no completed jobs to be rated"));
    return;
  }
  const checklist = el("ul", { class: "unrated-jobs" });
  for (const job of listing.jobs) {
    const item = el("li", {},
      el("span", {}, `Job ${job.job_id} on ${job.date}: ${job.services.join(", ")} `));
    item.append(button("Rate", () => {
      void renderRatingForm(api, mount, job);
    }, { class: "open-rating", "data-job": String(job.job_id) }));
    checklist.append(item);
  }
  mount.append(checklist);
}

async function renderRatingForm(api: OmsApi, mount: HTMLElement,
                                job: UnratedJob): Promise<void> {
  const saved = await api.loadRatingDraft(job.job_id);
  const criteria = ["punctuality", "thoroughness", "courtesy"];
  const form = el("form", { class: "rating-form printable" });
  const scores = new Map<string, HTMLSelectElement>();
  for (const criterion of criteria) {
    const picker = select(criterion,
      [["", "-"], ["1", "1"], ["2", "2"], ["3", "3"], ["4", "4"], ["5", "5"]],
      String(saved.draft?.form[criterion] ?? ""));
    scores.set(criterion, picker);
    form.append(field(criterion, picker));
  }
  const slot = el("div", { class: "problems" });

  form.append(
    button("Save for later", async () => {
      const partial: Record<string, unknown> = {};
      for (const [criterion, picker] of scores) {
        if (picker.value) partial[criterion] = Number(picker.value);
      }
      await api.saveRatingDraft(job.job_id, partial);
      slot.replaceChildren(notice("success", "saved — finish whenever you like"));
    }, { class: "save-rating-draft" }),
    button("Print form", () => window.print(), { class: "print-rating" }),
    button("Submit rating", async () => {
      const itemized = [...scores.entries()]
        .filter(([, picker]) => picker.value !== "")
        .map(([criterion, picker]) => ({ criterion, score: Number(picker.value) }));
      const outcome = await flows.rateJob(api, job.job_id, itemized);
      if (!outcome.ok) {
        slot.replaceChildren(notice("error", outcome.message ?? "rating rejected"));
        return;
      }
      await renderRatingChecklist(api, mount);
      mount.prepend(
        notice("success", `Thanks — job ${job.job_id} rated ${outcome.data!.score}.`));
    }, { class: "submit-rating" }),
    slot,
  );
  mount.replaceChildren(el("h3", {}, `Feedback for job ${job.job_id}`), form);
}

async function renderHistory(api: OmsApi, mount: HTMLElement): Promise<void> {
  const { orders } = await api.orders("service");
  mount.replaceChildren(el("h3", {}, "Your orders (last six months)"));
  if (!orders.length) {
    mount.append(notice("info", "nothing ordered yet"));
    return;
  }
  mount.append(table(
    ["id", "date", "status", "total"],
    orders.map((order) => [order.id, order.date, order.status,
                           money(order.breakdown.total)])));
  for (const order of orders.filter((o) => o.status === "pending")) {
    mount.append(button(`Cancel order ${order.id}`, async () => {
      const outcome = await flows.cancelOrder(api, `service:${order.id}`);
      mount.append(outcome.ok
        ? notice("success", `order ${order.id} cancelled`)
        : notice("error", outcome.message ?? "cannot cancel"));
    }, { class: "cancel-order", "data-order": String(order.id) }));
  }
}
