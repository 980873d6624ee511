/** Example inputs so first-time users see what the generator can do. */

import type { FieldMode, FieldName } from "./state.js";

export interface Preset {
  label: string;
  fields: Record<FieldName, { value: string; mode: FieldMode }>;
  summary: string;
}

export const PRESETS: Preset[] = [
  {
    label: "Bug report",
    fields: {
      name: { value: "Bug report", mode: "value" },
      about: { value: "", mode: "mask" },
      title: { value: "", mode: "mask" },
      labels: { value: "", mode: "mask" },
      assignees: { value: "", mode: "empty" },
      headlines_type: { value: "# Heading", mode: "value" },
      headlines: {
        value: [
          "Describe the bug",
          "To Reproduce",
          "Expected behavior",
          "Screenshots (if appropriate)",
          "Environment",
          "Additional context",
        ].join("\n"),
        mode: "value",
      },
    },
    summary:
      "Collect bug reports with reproduction steps. The Environment section " +
      "should ask for the operating system, for example Ubuntu.",
  },
  {
    label: "Feature request",
    fields: {
      name: { value: "Feature request", mode: "value" },
      about: { value: "Suggest an idea for this project", mode: "value" },
      title: { value: "[FEATURE]", mode: "value" },
      labels: { value: "enhancement", mode: "value" },
      assignees: { value: "", mode: "empty" },
      headlines_type: { value: "# Heading", mode: "value" },
      headlines: { value: "", mode: "mask" },
    },
    summary: "",
  },
  {
    label: "Question",
    fields: {
      name: { value: "Question", mode: "value" },
      about: { value: "", mode: "mask" },
      title: { value: "", mode: "empty" },
      labels: { value: "question", mode: "value" },
      assignees: { value: "", mode: "empty" },
      headlines_type: { value: "", mode: "mask" },
      headlines: { value: "", mode: "mask" },
    },
    summary: "A short template for usage questions with a context section.",
  },
];
