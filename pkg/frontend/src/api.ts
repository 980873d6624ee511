/** Thin fetch client for the template service HTTP API. */

import type { DecodingConfig, FieldMapValue } from "./state.js";

export interface GenerateResponse {
  instruction: string;
  irt: string;
  warnings: string[];
}

export class ApiError extends Error {
  readonly status: number;

  constructor(status: number, message: string) {
    super(message);
    this.status = status;
  }
}

async function post<T>(url: string, body: unknown): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  } catch (err) {
    throw new ApiError(0, `service unreachable: ${String(err)}`);
  }
  if (!response.ok) {
    const text = await response.text();
    throw new ApiError(response.status, `${response.status}: ${text.slice(0, 300)}`);
  }
  return (await response.json()) as T;
}

export class ForgeClient {
  constructor(readonly baseUrl: string = "") {}

  async health(): Promise<boolean> {
    try {
      const response = await fetch(`${this.baseUrl}/api/health`);
      return response.ok;
    } catch {
      return false;
    }
  }

  async buildInstruction(fields: Record<string, FieldMapValue>): Promise<string> {
    const body = await post<{ instruction: string }>(
      `${this.baseUrl}/api/instruction`,
      fields,
    );
    return body.instruction;
  }

  async generate(
    fields: Record<string, FieldMapValue>,
    config?: DecodingConfig,
  ): Promise<GenerateResponse> {
    const payload: Record<string, unknown> = { ...fields };
    if (config) {
      payload.config = config;
    }
    return post<GenerateResponse>(`${this.baseUrl}/api/generate`, payload);
  }

  async validate(irt: string): Promise<string[]> {
    const body = await post<{ violations: string[] }>(
      `${this.baseUrl}/api/validate`,
      { irt },
    );
    return body.violations;
  }
}
