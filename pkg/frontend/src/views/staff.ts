/**
 * Staff home: your rotor, your own ratings (and nobody else's), and an
 * appeal button on each rating.
 */

import { Account, OmsApi } from "../api.js";
import { button, el, field, notice, page, table, textInput } from "../dom.js";
import * as flows from "../flows.js";

export function staffView(api: OmsApi, me: Account): HTMLElement {
  const root = page("My work");
  const rotorMount = el("div", { class: "rotor" });
  const ratingsMount = el("div", { class: "my-ratings" });
  root.append(rotorMount, ratingsMount);
  void renderRotor(api, rotorMount);
  void renderRatings(api, ratingsMount, me);
  return root;
}

async function renderRotor(api: OmsApi, mount: HTMLElement): Promise<void> {
  const { shifts } = await api.rotor();
  mount.replaceChildren(el("h3", {}, "Your rotor"));
  mount.append(shifts.length
    ? table(["date", "start", "end", "shift"],
            shifts.map((s) => [s.date, s.start, s.end, s.id]))
    : notice("info", "no shifts assigned yet"));
}

async function renderRatings(api: OmsApi, mount: HTMLElement,
                             me: Account): Promise<void> {
  const { ratings } = await api.employeeRatings(me.id);
  mount.replaceChildren(el("h3", {}, "Your ratings"));
  if (!ratings.length) {
    mount.append(notice("info", "no ratings yet"));
    return;
  }
  for (const rating of ratings) {
    const effective = rating.state === "revised"
      ? rating.revised_score : rating.score;
    const row = el("div", { class: "rating-row" },
      el("span", {}, `${rating.date} ${rating.kind}: scored ${effective} `
        + `(${rating.state}) `));
    if (rating.state !== "appealed") {
      const reason = textInput(`reason_${rating.id}`, "",
                               { placeholder: "what was unfair?" });
      row.append(field("Appeal reason", reason),
        button("Appeal this rating", async () => {
          const outcome = await flows.appealRating(api, rating.id, reason.value);
          row.append(outcome.ok
            ? notice("success", "appeal lodged; the score is excluded until "
                + "the director decides")
            : notice("error", outcome.message ?? "appeal rejected"));
        }, { class: "appeal-rating", "data-rating": String(rating.id) }));
    } else {
      row.append(notice("info", "appeal pending"));
    }
    mount.append(row);
  }
}
