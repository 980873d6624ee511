/**
 * Interactive template composer.
 *
 * Sidebar: metadata fields with value/empty/mask toggles, a free-text
 * summary, decoding sliders, and example presets. Main pane: a live
 * instruction preview (debounced) and the generated template in rendered
 * and raw views with copy/download.
 *
 * The preview and the Generate request are built from the same
 * toFieldMap(state) call, so what you see previewed is exactly what is
 * sent. Responses are guarded by sequence numbers; answers to superseded
 * requests are dropped.
 */

import { ApiError, ForgeClient } from "./api.js";
import { renderMarkdown } from "./markdown.js";
import { PRESETS } from "./presets.js";
import {
  CONFIG_BOUNDS,
  FIELD_NAMES,
  FieldMode,
  FieldName,
  FormState,
  clampConfig,
  emptyForm,
  toFieldMap,
} from "./state.js";

const FIELD_LABELS: Record<FieldName, string> = {
  name: "Name",
  about: "About",
  title: "Title",
  labels: "Labels (comma-separated)",
  assignees: "Assignees (comma-separated)",
  headlines_type: "Headline style",
  headlines: "Headlines (one per line)",
};

const MODES: { mode: FieldMode; label: string }[] = [
  { mode: "value", label: "value" },
  { mode: "empty", label: "empty" },
  { mode: "mask", label: "mask" },
];

export interface AppOptions {
  debounceMs?: number;
}

export interface AppHandle {
  state: FormState;
  elements: Record<string, HTMLElement>;
  refreshPreview: () => Promise<void>;
  generate: () => Promise<void>;
  applyPreset: (label: string) => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

export function mountApp(
  root: HTMLElement,
  client: ForgeClient,
  options: AppOptions = {},
): AppHandle {
  const debounceMs = options.debounceMs ?? 300;
  const state = emptyForm();

  let previewSeq = 0;
  let generateSeq = 0;
  let previewTimer: ReturnType<typeof setTimeout> | undefined;
  let lastFailed: (() => void) | undefined;

  // --- sidebar -------------------------------------------------------------

  const fieldInputs = {} as Record<FieldName, HTMLInputElement | HTMLTextAreaElement>;
  const modeButtons = {} as Record<FieldName, Record<FieldMode, HTMLButtonElement>>;

  const fieldBoxes = FIELD_NAMES.map((name) => {
    const input =
      name === "headlines"
        ? el("textarea", { id: `field-${name}`, rows: "6" })
        : el("input", { id: `field-${name}`, type: "text" });
    fieldInputs[name] = input;
    input.addEventListener("input", () => {
      state.fields[name].value = input.value;
      schedulePreview();
    });

    modeButtons[name] = {} as Record<FieldMode, HTMLButtonElement>;
    const toggles = MODES.map(({ mode, label }) => {
      const button = el("button", {
        type: "button",
        class: "mode",
        "data-field": name,
        "data-mode": mode,
      }, [label]);
      button.addEventListener("click", () => {
        state.fields[name].mode = mode;
        syncFieldWidgets();
        schedulePreview();
      });
      modeButtons[name][mode] = button;
      return button;
    });

    return el("div", { class: "field" }, [
      el("label", { for: `field-${name}` }, [FIELD_LABELS[name]]),
      input,
      el("div", { class: "modes" }, toggles),
    ]);
  });

  const summaryInput = el("textarea", { id: "summary", rows: "4" });
  summaryInput.addEventListener("input", () => {
    state.summary = summaryInput.value;
    schedulePreview();
  });

  const sliders: Record<string, HTMLInputElement> = {};
  const sliderBoxes = (
    Object.keys(CONFIG_BOUNDS) as (keyof typeof CONFIG_BOUNDS)[]
  ).map((key) => {
    const bounds = CONFIG_BOUNDS[key];
    const slider = el("input", {
      id: `cfg-${key}`,
      type: "range",
      min: String(bounds.min),
      max: String(bounds.max),
      step: String(bounds.step),
      value: String(state.config[key]),
    });
    const valueLabel = el("output", { id: `cfg-${key}-value` }, [
      String(state.config[key]),
    ]);
    slider.addEventListener("input", () => {
      state.config = clampConfig({ ...state.config, [key]: Number(slider.value) });
      valueLabel.textContent = String(state.config[key]);
    });
    sliders[key] = slider;
    return el("div", { class: "slider" }, [
      el("label", { for: `cfg-${key}` }, [key.replace("_", " ")]),
      slider,
      valueLabel,
    ]);
  });

  const presetButtons = PRESETS.map((preset) => {
    const button = el("button", {
      type: "button",
      class: "preset",
      "data-preset": preset.label,
    }, [preset.label]);
    button.addEventListener("click", () => applyPreset(preset.label));
    return button;
  });

  // --- main pane -------------------------------------------------------------

  const preview = el("pre", { id: "preview" });
  const generateButton = el("button", { id: "generate", type: "button" }, [
    "Generate",
  ]);
  const irtRendered = el("div", { id: "irt-rendered" });
  const irtRaw = el("pre", { id: "irt-raw", hidden: "" });
  const viewRendered = el("button", { id: "view-rendered", type: "button" }, [
    "Rendered",
  ]);
  const viewRaw = el("button", { id: "view-raw", type: "button" }, ["Raw"]);
  const copyButton = el("button", { id: "copy", type: "button", disabled: "" }, [
    "Copy",
  ]);
  const downloadLink = el("a", { id: "download", download: "issue_template.md" }, [
    "Download",
  ]);
  const warningsList = el("ul", { id: "warnings" });
  const status = el("span", { id: "status" });
  const errorBox = el("div", { id: "error", hidden: "" });
  const errorText = el("span", { id: "error-text" });
  const retryButton = el("button", { id: "retry", type: "button" }, ["Retry"]);
  errorBox.append(errorText, retryButton);

  viewRendered.addEventListener("click", () => {
    irtRendered.hidden = false;
    irtRaw.hidden = true;
  });
  viewRaw.addEventListener("click", () => {
    irtRendered.hidden = true;
    irtRaw.hidden = false;
  });

  copyButton.addEventListener("click", async () => {
    const ok = await copyText(state.lastIrt);
    status.textContent = ok ? "copied" : "copy failed";
  });

  retryButton.addEventListener("click", () => {
    errorBox.hidden = true;
    lastFailed?.();
  });

  generateButton.addEventListener("click", () => {
    void generate();
  });

  root.append(
    el("div", { class: "sidebar" }, [
      el("h2", {}, ["Template inputs"]),
      el("div", { class: "presets" }, ["Examples: ", ...presetButtons]),
      ...fieldBoxes,
      el("label", { for: "summary" }, ["Summary (free-text constraints)"]),
      summaryInput,
      el("h2", {}, ["Model config"]),
      ...sliderBoxes,
    ]),
    el("div", { class: "main" }, [
      el("h2", {}, ["Instruction preview"]),
      preview,
      el("div", { class: "actions" }, [generateButton, status]),
      errorBox,
      el("h2", {}, ["Generated template"]),
      el("div", { class: "views" }, [viewRendered, viewRaw, copyButton, downloadLink]),
      warningsList,
      irtRendered,
      irtRaw,
    ]),
  );

  // --- behavior ---------------------------------------------------------------

  function syncFieldWidgets(): void {
    for (const name of FIELD_NAMES) {
      const { mode } = state.fields[name];
      const input = fieldInputs[name];
      // a field in empty/mask mode has no editable value
      input.disabled = mode !== "value";
      input.value = mode === "value" ? state.fields[name].value : "";
      for (const { mode: m } of MODES) {
        modeButtons[name][m].classList.toggle("active", m === mode);
      }
    }
    summaryInput.value = state.summary;
    for (const [key, slider] of Object.entries(sliders)) {
      slider.value = String(state.config[key as keyof typeof state.config]);
      const label = root.querySelector(`#cfg-${key}-value`);
      if (label) label.textContent = slider.value;
    }
  }

  function showError(message: string, retry: () => void): void {
    errorText.textContent = message;
    errorBox.hidden = false;
    lastFailed = retry;
  }

  function schedulePreview(): void {
    if (previewTimer !== undefined) {
      clearTimeout(previewTimer);
    }
    previewTimer = setTimeout(() => {
      previewTimer = undefined;
      void refreshPreview();
    }, debounceMs);
  }

  async function refreshPreview(): Promise<void> {
    const seq = ++previewSeq;
    try {
      const instruction = await client.buildInstruction(toFieldMap(state));
      if (seq !== previewSeq) {
        return; // a newer preview is already in flight
      }
      state.lastInstruction = instruction;
      preview.textContent = instruction;
    } catch (err) {
      if (seq !== previewSeq) {
        return;
      }
      showError(describe(err), () => void refreshPreview());
    }
  }

  async function generate(): Promise<void> {
    if (generateButton.disabled) {
      return; // one generate request at a time
    }
    const seq = ++generateSeq;
    generateButton.disabled = true;
    status.textContent = "generating…";
    try {
      const response = await client.generate(toFieldMap(state), state.config);
      if (seq !== generateSeq) {
        return;
      }
      state.lastInstruction = response.instruction;
      state.lastIrt = response.irt;
      preview.textContent = response.instruction;
      irtRaw.textContent = response.irt;
      irtRendered.innerHTML = renderMarkdown(response.irt);
      downloadLink.setAttribute(
        "href",
        "data:text/markdown;charset=utf-8," + encodeURIComponent(response.irt),
      );
      copyButton.disabled = false;
      warningsList.replaceChildren(
        ...response.warnings.map((w) => el("li", { class: "warning" }, [w])),
      );
      status.textContent = "done";
    } catch (err) {
      if (seq === generateSeq) {
        status.textContent = "";
        showError(describe(err), () => void generate());
      }
    } finally {
      if (seq === generateSeq) {
        generateButton.disabled = false;
      }
    }
  }

  function applyPreset(label: string): void {
    const preset = PRESETS.find((p) => p.label === label);
    if (!preset) {
      return;
    }
    for (const name of FIELD_NAMES) {
      state.fields[name] = { ...preset.fields[name] };
    }
    state.summary = preset.summary;
    syncFieldWidgets();
    schedulePreview();
  }

  syncFieldWidgets();
  schedulePreview();

  return {
    state,
    elements: {
      preview,
      generateButton,
      irtRendered,
      irtRaw,
      copyButton,
      downloadLink,
      warningsList,
      status,
      errorBox,
      retryButton,
      summaryInput,
    },
    refreshPreview,
    generate,
    applyPreset,
  };
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return err.status === 0 ? err.message : `request failed (${err.message})`;
  }
  return String(err);
}

async function copyText(text: string): Promise<boolean> {
  try {
    if (navigator.clipboard?.writeText) {
      await navigator.clipboard.writeText(text);
      return true;
    }
  } catch {
    // fall through to the legacy path
  }
  try {
    const scratch = document.createElement("textarea");
    scratch.value = text;
    document.body.append(scratch);
    scratch.select();
    const ok = document.execCommand("copy");
    scratch.remove();
    return ok;
  } catch {
    return false;
  }
}
