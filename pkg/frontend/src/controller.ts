// DOM-free panel controllers: validate, query, build the view model. app.ts
// only forwards input events in and paints view models out, so everything
// behavioral is testable against a mock service.

import { ApiClient, ApiRequestError, LatestOnly } from "./api.js";
import {
  AuthorFormState,
  authorFormToRequest,
  PaperFormState,
  paperFormToRequest,
} from "./forms.js";
import { paperModel, PaperModel, trajectoryModel, TrajectoryModel } from "./render.js";
import type { FieldError } from "./types.js";
import { validateAuthorForm, validatePaperForm } from "./validate.js";

export const HORIZONS = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10] as const;

export type AuthorOutcome =
  | { kind: "invalid"; errors: FieldError[] }
  | { kind: "ok"; model: TrajectoryModel }
  | { kind: "api-error"; error: FieldError }
  | { kind: "aborted" }
  | { kind: "network-error"; message: string };

export async function runAuthorQuery(
  form: AuthorFormState,
  api: ApiClient,
  inflight: LatestOnly,
  horizons: readonly number[] = HORIZONS,
): Promise<AuthorOutcome> {
  const errors = validateAuthorForm(authorFormToRequest(form, horizons[0] ?? 1));
  if (errors.length > 0) {
    return { kind: "invalid", errors }; // nothing is sent for an invalid form
  }
  try {
    const responses = await inflight.call((signal) =>
      api.hindexTrajectory(authorFormToRequest(form, 1), horizons, signal),
    );
    return { kind: "ok", model: trajectoryModel(responses) };
  } catch (err) {
    return classifyFailure(err);
  }
}

export type PaperOutcome =
  | { kind: "invalid"; errors: FieldError[] }
  | { kind: "ok"; model: PaperModel }
  | { kind: "api-error"; error: FieldError; needsManualProfile: boolean }
  | { kind: "aborted" }
  | { kind: "network-error"; message: string };

export async function runPaperQuery(
  form: PaperFormState,
  api: ApiClient,
  inflight: LatestOnly,
): Promise<PaperOutcome> {
  const request = paperFormToRequest(form);
  const errors = validatePaperForm(request);
  if (errors.length > 0) {
    return { kind: "invalid", errors };
  }
  try {
    const response = await inflight.call((signal) => api.predictPaper(request, signal));
    return { kind: "ok", model: paperModel(response) };
  } catch (err) {
    const failure = classifyFailure(err);
    if (failure.kind === "api-error") {
      return { ...failure, needsManualProfile: failure.error.message.includes("manual profile") };
    }
    return failure;
  }
}

function classifyFailure(err: unknown):
  | { kind: "api-error"; error: FieldError }
  | { kind: "aborted" }
  | { kind: "network-error"; message: string } {
  if (err instanceof DOMException && err.name === "AbortError") {
    return { kind: "aborted" };
  }
  if (err instanceof ApiRequestError) {
    return { kind: "api-error", error: { field: err.field ?? "request", message: err.message } };
  }
  return { kind: "network-error", message: err instanceof Error ? err.message : String(err) };
}
