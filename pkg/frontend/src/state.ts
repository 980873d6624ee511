/**
 * Form state and its mapping onto the service's field-map wire format.
 *
 * Every metadata field carries a mode besides its value: "value" sends the
 * text as typed (a blank value falls back to the mask token), "empty"
 * forces <|EMPTY|> and "mask" forces <|MASK|> regardless of the text.
 */

export const MASK_TOKEN = "<|MASK|>";
export const EMPTY_TOKEN = "<|EMPTY|>";

export type FieldMode = "value" | "empty" | "mask";

export const FIELD_NAMES = [
  "name",
  "about",
  "title",
  "labels",
  "assignees",
  "headlines_type",
  "headlines",
] as const;

export type FieldName = (typeof FIELD_NAMES)[number];

export interface FieldState {
  value: string;
  mode: FieldMode;
}

export interface DecodingConfig {
  max_length: number;
  min_length: number;
  top_p: number;
  top_k: number;
}

export interface FormState {
  fields: Record<FieldName, FieldState>;
  summary: string;
  config: DecodingConfig;
  lastInstruction: string;
  lastIrt: string;
}

export const CONFIG_BOUNDS = {
  max_length: { min: 16, max: 2048, step: 16 },
  min_length: { min: 0, max: 2048, step: 16 },
  top_p: { min: 0.05, max: 1, step: 0.05 },
  top_k: { min: 1, max: 200, step: 1 },
} as const;

export const DEFAULT_CONFIG: DecodingConfig = {
  max_length: 512,
  min_length: 0,
  top_p: 0.95,
  top_k: 50,
};

export function emptyForm(): FormState {
  const fields = {} as Record<FieldName, FieldState>;
  for (const name of FIELD_NAMES) {
    fields[name] = { value: "", mode: "value" };
  }
  return {
    fields,
    summary: "",
    config: { ...DEFAULT_CONFIG },
    lastInstruction: "",
    lastIrt: "",
  };
}

export function clampConfig(config: DecodingConfig): DecodingConfig {
  const clamp = (v: number, lo: number, hi: number) =>
    Math.min(hi, Math.max(lo, v));
  const max_length = clamp(
    Math.round(config.max_length),
    CONFIG_BOUNDS.max_length.min,
    CONFIG_BOUNDS.max_length.max,
  );
  return {
    max_length,
    min_length: clamp(Math.round(config.min_length), 0, max_length),
    top_p: clamp(config.top_p, CONFIG_BOUNDS.top_p.min, CONFIG_BOUNDS.top_p.max),
    top_k: clamp(Math.round(config.top_k), CONFIG_BOUNDS.top_k.min, CONFIG_BOUNDS.top_k.max),
  };
}

/** The headlines widget is a plain text list: one headline per line. */
export function splitHeadlines(text: string): string[] {
  return text
    .split("\n")
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
}

export type FieldMapValue = string | string[];

/**
 * Build the request body both the preview and Generate share. A field left
 * blank in "value" mode maps to the mask token, so the model decides.
 */
export function toFieldMap(state: FormState): Record<string, FieldMapValue> {
  const body: Record<string, FieldMapValue> = {};
  for (const name of FIELD_NAMES) {
    const field = state.fields[name];
    if (field.mode === "empty") {
      body[name] = EMPTY_TOKEN;
      continue;
    }
    if (field.mode === "mask") {
      body[name] = MASK_TOKEN;
      continue;
    }
    if (name === "headlines") {
      const items = splitHeadlines(field.value);
      body[name] = items.length > 0 ? items : MASK_TOKEN;
    } else {
      const trimmed = field.value.trim();
      body[name] = trimmed.length > 0 ? trimmed : MASK_TOKEN;
    }
  }
  const summary = state.summary.trim();
  if (summary.length > 0) {
    body.summary = summary;
  }
  return body;
}
