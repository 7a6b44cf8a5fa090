// Thin typed client for the prediction service. Every in-flight request is
// cancellable; the form layer aborts a superseded query before issuing the
// next one, so stale responses never land in the UI.
import { API_SCHEMA } from "./schema.js";
export class ApiRequestError extends Error {
    status;
    code;
    field;
    constructor(status, code, message, field) {
        super(message);
        this.status = status;
        this.code = code;
        this.field = field;
    }
}
export class ApiClient {
    baseUrl;
    fetchImpl;
    constructor(baseUrl = "", fetchImpl = (input, init) => fetch(input, init)) {
        this.baseUrl = baseUrl;
        this.fetchImpl = fetchImpl;
    }
    async post(path, body, signal) {
        const resp = await this.fetchImpl(this.baseUrl + path, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
            signal,
        });
        const payload = (await resp.json());
        if (!resp.ok) {
            const err = payload.error ?? { code: "unknown", message: "request failed" };
            throw new ApiRequestError(resp.status, err.code, err.message, err.field);
        }
        return payload;
    }
    predictHIndex(request, signal) {
        return this.post(API_SCHEMA.endpoints.predict_hindex.path, request, signal);
    }
    predictPaper(request, signal) {
        return this.post(API_SCHEMA.endpoints.predict_paper.path, request, signal);
    }
    async health(signal) {
        const resp = await this.fetchImpl(this.baseUrl + API_SCHEMA.endpoints.health.path, { signal });
        const payload = (await resp.json());
        if (!resp.ok) {
            const err = payload.error;
            throw new ApiRequestError(resp.status, err.code, err.message);
        }
        return payload;
    }
    /**
     * The author panel draws a trajectory: one service call per horizon year,
     * in order. A shared signal cancels the whole sweep.
     */
    async hindexTrajectory(base, horizons, signal) {
        const out = [];
        for (const horizon of horizons) {
            out.push(await this.predictHIndex({ ...base, horizon_years: horizon }, signal));
        }
        return out;
    }
}
/** Re-issue guard: each call() aborts whatever was previously in flight. */
export class LatestOnly {
    controller = null;
    async call(run) {
        this.controller?.abort();
        const controller = new AbortController();
        this.controller = controller;
        return run(controller.signal);
    }
    cancel() {
        this.controller?.abort();
        this.controller = null;
    }
}
