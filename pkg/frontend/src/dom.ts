/**
 * Tiny DOM helpers. Everything interactive is a native button, link, input,
 * or select, so the whole UI is keyboard-operable with no extra wiring, and
 * text lands as text nodes — never parsed as markup — so nothing the server
 * sends can execute.
 */

type Child = Node | string | null | undefined;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | boolean | ((event: Event) => void)> = {},
  ...children: Child[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (typeof value === "function") {
      node.addEventListener(key.replace(/^on/, ""), value);
    } else if (typeof value === "boolean") {
      if (value) node.setAttribute(key, "");
    } else {
      node.setAttribute(key, value);
    }
  }
  for (const child of children) {
    if (child == null) continue;
    node.append(typeof child === "string" ? document.createTextNode(child) : child);
  }
  return node;
}

export function button(label: string, onClick: () => void,
                       attrs: Record<string, string> = {}): HTMLButtonElement {
  const b = el("button", { type: "button", ...attrs }, label);
  b.addEventListener("click", onClick);
  return b;
}

export function field(labelText: string, input: HTMLElement): HTMLLabelElement {
  return el("label", { class: "field" }, el("span", {}, labelText), input);
}

export function textInput(name: string, value = "",
                          attrs: Record<string, string> = {}): HTMLInputElement {
  return el("input", { type: "text", name, value, ...attrs });
}

export function numberInput(name: string, value: number,
                            attrs: Record<string, string> = {}): HTMLInputElement {
  return el("input", { type: "number", name, value: String(value), ...attrs });
}

export function select(name: string, options: [string, string][],
                       selected?: string): HTMLSelectElement {
  const node = el("select", { name });
  for (const [value, label] of options) {
    const option = el("option", { value }, label);
    if (value === selected) option.setAttribute("selected", "");
    node.append(option);
  }
  return node;
}

export function money(pence: number): string {
  // display formatting only; the amount itself is verbatim from the API
  const sign = pence < 0 ? "-" : "";
  const abs = Math.abs(pence);
  return `${sign}£${Math.floor(abs / 100)}.${String(abs % 100).padStart(2, "0")}`;
}

export function table(columns: string[], rows: (string | number | null)[][]): HTMLTableElement {
  const head = el("tr", {}, ...columns.map((c) => el("th", {}, c)));
  const body = rows.map((row) =>
    el("tr", {}, ...row.map((cell) => el("td", {}, cell == null ? "" : String(cell)))));
  return el("table", {}, el("thead", {}, head), el("tbody", {}, ...body));
}

export function notice(kind: "info" | "error" | "success", text: string): HTMLElement {
  return el("p", { class: `notice ${kind}`, role: "status" }, text);
}

/**
 * Inline confirmation bar instead of window.confirm: reachable by keyboard,
 * testable, and it forces an explicit yes/no.
 */
export function confirmBar(question: string, onYes: () => void,
                           onNo: () => void): HTMLElement {
  const bar = el("div", { class: "confirm-bar", role: "alertdialog" },
    el("span", {}, question));
  bar.append(button("Yes", () => { bar.remove(); onYes(); }, { class: "confirm-yes" }));
  bar.append(button("No", () => { bar.remove(); onNo(); }, { class: "confirm-no" }));
  return bar;
}

/** Every page carries a help link (and help is a page of its own). */
export function helpLink(): HTMLAnchorElement {
  return el("a", { href: "#/help", class: "help-link" }, "Help");
}

export function page(title: string, ...children: Child[]): HTMLElement {
  return el("section", { class: "page", "data-page": title },
    el("header", {}, el("h2", {}, title), helpLink()),
    ...children);
}
