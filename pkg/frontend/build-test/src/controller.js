// DOM-free panel controllers: validate, query, build the view model. app.ts
// only forwards input events in and paints view models out, so everything
// behavioral is testable against a mock service.
import { ApiRequestError } from "./api.js";
import { authorFormToRequest, paperFormToRequest, } from "./forms.js";
import { paperModel, trajectoryModel } from "./render.js";
import { validateAuthorForm, validatePaperForm } from "./validate.js";
export const HORIZONS = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];
export async function runAuthorQuery(form, api, inflight, horizons = HORIZONS) {
    const errors = validateAuthorForm(authorFormToRequest(form, horizons[0] ?? 1));
    if (errors.length > 0) {
        return { kind: "invalid", errors }; // nothing is sent for an invalid form
    }
    try {
        const responses = await inflight.call((signal) => api.hindexTrajectory(authorFormToRequest(form, 1), horizons, signal));
        return { kind: "ok", model: trajectoryModel(responses) };
    }
    catch (err) {
        return classifyFailure(err);
    }
}
export async function runPaperQuery(form, api, inflight) {
    const request = paperFormToRequest(form);
    const errors = validatePaperForm(request);
    if (errors.length > 0) {
        return { kind: "invalid", errors };
    }
    try {
        const response = await inflight.call((signal) => api.predictPaper(request, signal));
        return { kind: "ok", model: paperModel(response) };
    }
    catch (err) {
        const failure = classifyFailure(err);
        if (failure.kind === "api-error") {
            return { ...failure, needsManualProfile: failure.error.message.includes("manual profile") };
        }
        return failure;
    }
}
function classifyFailure(err) {
    if (err instanceof DOMException && err.name === "AbortError") {
        return { kind: "aborted" };
    }
    if (err instanceof ApiRequestError) {
        return { kind: "api-error", error: { field: err.field ?? "request", message: err.message } };
    }
    return { kind: "network-error", message: err instanceof Error ? err.message : String(err) };
}
