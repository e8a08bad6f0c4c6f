/**
 * Supplier tools: edit a dated product menu and define promotions (old and
 * promo price shown side by side, server validates the window and items).
 */

import { Account, OmsApi } from "../api.js";
import { button, el, field, money, notice, numberInput, page, table,
         textInput } from "../dom.js";
import * as flows from "../flows.js";

export function supplierView(api: OmsApi, me: Account, today: string): HTMLElement {
  const root = page("Supplier");
  const menuMount = el("div", { class: "menu-editor" });
  const promoMount = el("div", { class: "promo-editor" });
  root.append(menuMount, promoMount);
  renderMenuEditor(api, menuMount, today);
  void renderPromotions(api, promoMount, me, today);
  return root;
}

function renderMenuEditor(api: OmsApi, mount: HTMLElement, today: string): void {
  mount.replaceChildren(el("h3", {}, "Menu by date"));
  const date = textInput("menu_date", today);
  const output = el("div", { class: "menu-view" });
  const slot = el("div", { class: "problems" });

  mount.append(field("Date", date),
    button("Load menu", async () => {
      const menu = await api.menu(date.value, "products");
      output.replaceChildren();
      if (menu.notice) {
        output.append(notice("info", menu.notice));
        return;
      }
      for (const entry of menu.entries) {
        const price = numberInput(`price_${entry.item_id}`, entry.unit_price);
        const units = numberInput(`units_${entry.item_id}`, entry.available_units);
        const row = el("div", { class: "menu-entry" },
          el("span", {}, `${entry.name} (${money(entry.display_price ?? entry.unit_price)}) `),
          field("Price (pence)", price), field("Units", units),
          button("Save", async () => {
            const outcome = await flows.run(() => api.modifyMenu(
              date.value, "products",
              [{ op: "update", entry: { item_id: entry.item_id, name: entry.name,
                                        unit_price: Number(price.value),
                                        supplier_id: entry.supplier_id,
                                        available_units: Number(units.value) } }]));
            slot.replaceChildren(outcome.ok
              ? notice("success", `${entry.name} updated`)
              : notice("error", outcome.message ?? "menu not saved"));
          }, { class: "save-entry" }));
        output.append(row);
      }
    }, { class: "load-menu" }),
    output, slot);
}

async function renderPromotions(api: OmsApi, mount: HTMLElement, me: Account,
                                today: string): Promise<void> {
  mount.replaceChildren(el("h3", {}, "Promotions"));
  const name = textInput("promo_name", "");
  const start = textInput("promo_start", today);
  const end = textInput("promo_end", today);
  const item = textInput("promo_item", "", { placeholder: "item id" });
  const price = numberInput("promo_price", 0);
  const slot = el("div", { class: "problems" });
  mount.append(
    field("Name", name), field("Starts", start), field("Ends", end),
    field("Item", item), field("Promotion price (pence)", price),
    button("Create promotion", async () => {
      const outcome = await flows.run(() => api.definePromotion({
        name: name.value, start: start.value, end: end.value,
        item_prices: [{ item_id: item.value, promo_price: Number(price.value) }],
      }));
      slot.replaceChildren(outcome.ok
        ? notice("success", "promotion live; listings show old and new price")
        : notice("error", outcome.message ?? "promotion rejected"));
      void renderList();
    }, { class: "create-promotion" }),
    slot);

  const listMount = el("div", { class: "promo-list" });
  mount.append(listMount);
  async function renderList(): Promise<void> {
    const { promotions } = await api.promotions(me.username);
    listMount.replaceChildren(el("h4", {}, "Your promotions"));
    if (!promotions.length) {
      listMount.append(notice("info", "none yet"));
      return;
    }
    const rows = (promotions as { name: string; start: string; end: string;
                                  items: { item_id: string; old_price: number;
                                           promo_price: number }[] }[])
      .flatMap((p) => p.items.map((i) => [p.name, p.start, p.end, i.item_id,
                                          money(i.old_price), money(i.promo_price)]));
    listMount.append(table(["name", "from", "to", "item", "old", "promo"], rows));
  }
  void renderList();
}
