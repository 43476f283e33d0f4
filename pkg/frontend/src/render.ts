/** DOM rendering. No semantics here: everything shown comes from the service. */

import type { SessionStore, UiSessionView } from "./store";
import type { SessionConfig } from "./types";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function button(label: string, className: string, onClick: () => void, disabled = false): HTMLButtonElement {
  const node = el("button", className, label);
  node.type = "button";
  node.disabled = disabled;
  node.addEventListener("click", onClick);
  return node;
}

function renderForm(store: SessionStore, view: UiSessionView): HTMLElement {
  const form = el("section", "create-form");
  form.append(el("h2", undefined, "Start a session"));

  const kbInput = el("textarea", "kb-input");
  kbInput.rows = 10;
  kbInput.placeholder = "[K]\npower -> sensor\n…\n[B]\npower\n[N]\n~alarm";
  form.append(kbInput);

  const controls = el("div", "form-controls");
  const queryType = el("select", "query-type");
  for (const value of ["sq", "normal"]) queryType.append(option(value));
  const heuristic = el("select", "heuristic");
  for (const value of ["ent", "spl"]) heuristic.append(option(value));
  const cap = el("input", "leading-cap");
  cap.type = "number";
  cap.min = "2";
  cap.value = "9";
  controls.append(
    label("queries", queryType),
    label("heuristic", heuristic),
    label("leading diagnoses", cap),
  );
  form.append(controls);

  form.append(
    button(
      "Start session",
      "start-button",
      () => {
        const config: SessionConfig = {
          queryType: queryType.value as SessionConfig["queryType"],
          heuristic: heuristic.value as SessionConfig["heuristic"],
          leadingCap: Number(cap.value),
        };
        void store.start(kbInput.value, config);
      },
      view.inFlight,
    ),
  );

  if (view.formError !== null) form.append(el("p", "form-error", view.formError));
  return form;
}

function option(value: string): HTMLOptionElement {
  const node = el("option", undefined, value);
  node.value = value;
  return node;
}

function label(text: string, control: HTMLElement): HTMLLabelElement {
  const node = el("label", undefined, text + " ");
  node.append(control);
  return node;
}

function renderMetrics(view: UiSessionView): HTMLElement {
  const metrics = view.snapshot!.metrics;
  const strip = el("div", "metrics");
  strip.append(el("span", "metric-queries", `#Q ${metrics.numQueries}`));
  strip.append(el("span", "metric-axioms", `#Ax ${metrics.numAxioms}`));
  strip.append(el("span", "metric-elapsed", `waited ${(metrics.totalSelectionNanos / 1e6).toFixed(1)} ms`));
  return strip;
}

function renderDiagnoses(view: UiSessionView): HTMLElement {
  const snapshot = view.snapshot!;
  const section = el("section", "diagnoses");
  const suffix = snapshot.complete ? "" : " (more may exist)";
  section.append(el("h2", undefined, `Candidate diagnoses — ${snapshot.diagnoses.length}${suffix}`));
  for (const diagnosis of snapshot.diagnoses) {
    const card = el("div", "diagnosis-card");
    const bar = el("div", "probability-bar");
    const fill = el("div", "probability-fill");
    fill.style.width = `${Math.round(diagnosis.probability * 100)}%`;
    bar.append(fill);
    card.append(
      el("div", "diagnosis-axioms", diagnosis.axioms.join("  ∧  ")),
      bar,
      el("span", "probability-value", diagnosis.probability.toFixed(3)),
    );
    section.append(card);
  }
  return section;
}

function renderQuery(store: SessionStore, view: UiSessionView): HTMLElement {
  const section = el("section", "query-card");
  section.append(el("h2", undefined, "Is this part of the intended KB?"));

  const toggle = el("div", "mode-toggle");
  toggle.append(
    button("per-axiom", view.answerMode === "labels" ? "mode-on" : "mode-off", () => store.setMode("labels")),
    button("whole-query", view.answerMode === "whole" ? "mode-on" : "mode-off", () => store.setMode("whole")),
  );
  section.append(toggle);

  const list = el("ol", "query-axioms");
  for (const axiom of view.pendingQuery!) {
    const item = el("li", "query-axiom");
    item.append(el("code", "axiom-text", axiom.text));
    if (view.answerMode === "labels") {
      const value = view.draft.get(axiom.id);
      item.append(
        button("true", value === true ? "label-on" : "label-off", () => store.setLabel(axiom.id, true), view.inFlight),
        button("false", value === false ? "label-on" : "label-off", () => store.setLabel(axiom.id, false), view.inFlight),
      );
    }
    list.append(item);
  }
  section.append(list);

  if (view.answerMode === "labels") {
    section.append(
      button(
        "Submit labels",
        "submit-labels",
        () => void store.submitLabels(),
        view.inFlight || store.orderedLabels().length === 0,
      ),
    );
  } else {
    section.append(
      button("Whole query: true", "whole-true", () => void store.submitWhole(true), view.inFlight),
      button("Whole query: false", "whole-false", () => void store.submitWhole(false), view.inFlight),
    );
  }
  return section;
}

function renderResult(view: UiSessionView): HTMLElement {
  const result = view.snapshot!.result!;
  const panel = el("section", "result-panel");
  panel.append(el("h2", undefined, "Faulty axioms isolated"));
  const list = el("ul", "result-axioms");
  for (const text of result.axioms) {
    const item = el("li", "result-axiom");
    item.append(el("code", "axiom-text", text));
    list.append(item);
  }
  panel.append(list);
  return panel;
}

function renderHistory(view: UiSessionView): HTMLElement {
  const section = el("section", "history");
  section.append(el("h2", undefined, "History"));
  const list = el("ol", "history-entries");
  for (const entry of view.snapshot!.history) {
    const answer =
      entry.answer.kind === "labels"
        ? entry.answer.labels.map(([id, value]) => `${id}:${value ? "t" : "f"}`).join(" ")
        : entry.answer.kind;
    list.append(el("li", "history-entry", `asked ${entry.query.axiomIds.join(",")} → ${answer} (effort ${entry.answer.effort})`));
  }
  section.append(list);
  return section;
}

export function render(root: HTMLElement, store: SessionStore): void {
  const view = store.view;
  root.textContent = "";
  root.append(el("h1", undefined, "oracle-loop"));

  if (view.banner !== null) {
    const banner = el("div", "banner", view.banner + " ");
    banner.append(button("Retry", "retry-button", () => void store.retry(), view.inFlight));
    root.append(banner);
  }

  if (view.snapshot === null) {
    root.append(renderForm(store, view));
    return;
  }

  root.append(renderMetrics(view));
  if (view.snapshot.finished) {
    root.append(renderResult(view));
  } else if (view.pendingQuery !== null) {
    root.append(renderQuery(store, view));
  }
  root.append(renderDiagnoses(view));
  if (view.snapshot.history.length > 0) root.append(renderHistory(view));
}
