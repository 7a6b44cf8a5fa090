// Request/response shapes of the prediction API (docs/api_schema.json).
export {};
