// DOM wiring for the what-if tool. All numbers on screen come from service
// responses via controller view models; this file only moves them into
// elements and routes edits back into requests.

import { ApiClient, LatestOnly } from "./api.js";
import { runAuthorQuery, runPaperQuery } from "./controller.js";
import { debounce } from "./debounce.js";
import { AuthorFormState, emptyAuthorRow, PaperFormState } from "./forms.js";
import type { FieldError } from "./types.js";

const DEBOUNCE_MS = 400;

const api = new ApiClient("");
const authorInflight = new LatestOnly();
const paperInflight = new LatestOnly();

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  node.append(...children);
  return node;
}

function byId<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

function showErrors(containerId: string, errors: FieldError[]): void {
  const box = byId<HTMLElement>(containerId);
  box.replaceChildren(...errors.map((e) => el("li", { class: "error" }, e.message)));
}

// ---------------------------------------------------------------------------
// author panel

function readAuthorForm(): AuthorFormState {
  return {
    current_h: byId<HTMLInputElement>("a-current-h").value,
    num_papers: byId<HTMLInputElement>("a-num-papers").value,
    avg_citations: byId<HTMLInputElement>("a-avg-citations").value,
    num_coauthors: byId<HTMLInputElement>("a-num-coauthors").value,
    years_active: byId<HTMLInputElement>("a-years-active").value,
  };
}

async function submitAuthorForm(): Promise<void> {
  const status = byId<HTMLElement>("author-status");
  status.textContent = "querying...";
  const outcome = await runAuthorQuery(readAuthorForm(), api, authorInflight);
  if (outcome.kind === "aborted") return;
  status.textContent = outcome.kind === "network-error"
    ? "network failure; check the service and retry"
    : "";
  if (outcome.kind === "invalid") {
    showErrors("author-errors", outcome.errors);
    return;
  }
  if (outcome.kind === "api-error") {
    showErrors("author-errors", [outcome.error]);
    return;
  }
  if (outcome.kind !== "ok") return;
  showErrors("author-errors", []);
  const model = outcome.model;
  byId<HTMLElement>("trajectory-line").setAttribute("points", model.polyline);
  byId<HTMLElement>("trajectory-rows").replaceChildren(
    ...model.points.map((p) =>
      el(
        "tr",
        {},
        el("td", {}, String(p.horizon)),
        el("td", {}, p.predicted_h.toFixed(2)),
        el("td", {}, p.clipped ? "clipped" : ""),
      ),
    ),
  );
  byId<HTMLElement>("author-clip-notices").replaceChildren(
    ...model.clipNotices.map((n) => el("li", {}, n)),
  );
}

// ---------------------------------------------------------------------------
// paper panel

const paperForm: PaperFormState = {
  title: "",
  abstract: "",
  year: "2007",
  primary_mode: "max-h",
  venue_kind: "name",
  venue_name: "",
  venue_h: "",
  venue_avg: "",
  authors: [emptyAuthorRow()],
};

function labelled(
  id: string,
  text: string,
  value: string,
  onInput: (value: string) => void,
): HTMLElement {
  const input = el("input", { id: `f-${id}`, value }) as HTMLInputElement;
  input.addEventListener("input", () => {
    onInput(input.value);
    queuePaperQuery();
  });
  return el("label", {}, text, input);
}

function renderAuthorRows(promptManualFor?: number): void {
  const holder = byId<HTMLElement>("paper-authors");
  holder.replaceChildren(
    ...paperForm.authors.map((row, i) => {
      const needsManual = !row.author_id;
      const manual = el(
        "div",
        { class: needsManual ? "manual" : "manual hidden" },
        labelled(`h${i}`, "h-index", row.manual_h, (v) => (row.manual_h = v)),
        labelled(`p${i}`, "prior citations (comma list)", row.manual_prior, (v) => (row.manual_prior = v)),
        labelled(`d${i}`, "h growth, last 3y", row.manual_delta, (v) => (row.manual_delta = v)),
      );
      const fields = el(
        "fieldset",
        { class: promptManualFor === i ? "author-row needs-manual" : "author-row" },
        labelled(`n${i}`, "name", row.name, (v) => (row.name = v)),
        labelled(`i${i}`, "corpus author id (blank = manual)", row.author_id, (v) => {
          row.author_id = v;
          renderAuthorRows();
        }),
        manual,
      );
      if (promptManualFor === i) {
        fields.append(el("p", { class: "error" }, "not in the corpus: fill in the manual profile"));
      }
      return fields;
    }),
  );
}

async function submitPaperForm(): Promise<void> {
  const status = byId<HTMLElement>("paper-status");
  status.textContent = "querying...";
  const outcome = await runPaperQuery(paperForm, api, paperInflight);
  if (outcome.kind === "aborted") return;
  status.textContent = outcome.kind === "network-error"
    ? "network failure; check the service and retry"
    : "";
  if (outcome.kind === "invalid") {
    showErrors("paper-errors", outcome.errors);
    return;
  }
  if (outcome.kind === "api-error") {
    showErrors("paper-errors", [outcome.error]);
    if (outcome.needsManualProfile) {
      const at = paperForm.authors.findIndex((row) => !row.author_id && !row.manual_h);
      renderAuthorRows(at >= 0 ? at : undefined);
    }
    return;
  }
  if (outcome.kind !== "ok") return;
  showErrors("paper-errors", []);
  const model = outcome.model;
  byId<HTMLElement>("probability-value").textContent = model.probability.toFixed(3);
  byId<HTMLElement>("probability-fill").style.width = `${model.gaugePercent}%`;
  byId<HTMLElement>("primary-author").textContent =
    `primary author: ${model.primaryAuthor}` +
    (model.predictedFutureH === null
      ? ""
      : ` (predicted future h ${model.predictedFutureH.toFixed(2)})`);
  byId<HTMLElement>("paper-flags").replaceChildren(...model.flags.map((f) => el("li", {}, f)));
  byId<HTMLElement>("factor-bars").replaceChildren(
    ...model.bars.map((bar) => {
      const fill = el("div", { class: "bar-fill" });
      fill.style.width = `${(bar.fraction * 100).toFixed(1)}%`;
      return el(
        "div",
        { class: "bar-row" },
        el("span", { class: "bar-name" }, bar.factor),
        el("div", { class: "bar-track" }, fill),
        el("span", { class: "bar-value" }, bar.value.toPrecision(4)),
      );
    }),
  );
}

const queuePaperQuery = debounce(() => void submitPaperForm(), DEBOUNCE_MS);

// ---------------------------------------------------------------------------
// boot

export function boot(): void {
  byId<HTMLButtonElement>("author-submit").addEventListener("click", () => void submitAuthorForm());
  for (const id of ["title", "abstract", "year", "venue-name", "venue-h", "venue-avg"]) {
    const input = byId<HTMLInputElement | HTMLTextAreaElement>(`paper-${id}`);
    input.addEventListener("input", () => {
      if (id === "title") paperForm.title = input.value;
      if (id === "abstract") paperForm.abstract = input.value;
      if (id === "year") paperForm.year = input.value;
      if (id === "venue-name") paperForm.venue_name = input.value;
      if (id === "venue-h") paperForm.venue_h = input.value;
      if (id === "venue-avg") paperForm.venue_avg = input.value;
      queuePaperQuery();
    });
  }
  byId<HTMLSelectElement>("paper-mode").addEventListener("change", (event) => {
    paperForm.primary_mode = (event.target as HTMLSelectElement).value as "max-h" | "first";
    queuePaperQuery();
  });
  byId<HTMLSelectElement>("paper-venue-kind").addEventListener("change", (event) => {
    paperForm.venue_kind = (event.target as HTMLSelectElement).value as "name" | "manual";
    byId<HTMLElement>("venue-manual-fields").classList.toggle(
      "hidden",
      paperForm.venue_kind !== "manual",
    );
    queuePaperQuery();
  });
  byId<HTMLButtonElement>("add-author").addEventListener("click", () => {
    paperForm.authors.push(emptyAuthorRow());
    renderAuthorRows();
  });
  renderAuthorRows();

  void api
    .health()
    .then((health) => {
      byId<HTMLElement>("footer-status").textContent =
        `service ok: corpus ${health.corpus_checksum.slice(0, 12)}, ` +
        `t=${health.t}, horizon ${health.delta_t}y`;
    })
    .catch(() => {
      byId<HTMLElement>("footer-status").textContent = "service unavailable";
    });
}

boot();
