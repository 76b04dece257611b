// Typed client for the reformulation service. All semantic knowledge lives
// server-side; this file only moves JSON around.

import type {
  ApiError,
  ClassEntry,
  ConceptDetail,
  ConceptSummary,
  ExecuteResponse,
  PropertyEntry,
  TranslationResponse,
} from './types.js'

export class ServiceError extends Error {
  readonly status: number
  readonly detail: ApiError

  constructor(status: number, detail: ApiError) {
    super(detail.message)
    this.status = status
    this.detail = detail
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(base + path, init)
  const body = await response.json().catch(() => null)
  if (!response.ok) {
    const detail: ApiError = body?.error ?? {
      code: 'http_error',
      message: `${response.status} ${response.statusText}`,
    }
    throw new ServiceError(response.status, detail)
  }
  return body as T
}

function post<T>(base: string, path: string, payload: unknown): Promise<T> {
  return request<T>(base, path, {
    method: 'POST',
    headers: { 'content-type': 'application/json' },
    body: JSON.stringify(payload),
  })
}

export class ApiClient {
  constructor(readonly base: string = '') {}

  health(): Promise<{ status: string }> {
    return request(this.base, '/api/health')
  }

  classes(parent?: string): Promise<ClassEntry[]> {
    const query = parent ? `?parent=${encodeURIComponent(parent)}` : ''
    return request<{ classes: ClassEntry[] }>(this.base, `/api/classes${query}`)
      .then((body) => body.classes)
  }

  classProperties(klass: string): Promise<PropertyEntry[]> {
    return request<{ properties: PropertyEntry[] }>(
      this.base, `/api/classes/${encodeURIComponent(klass)}/properties`,
    ).then((body) => body.properties)
  }

  propertyValues(property: string): Promise<string[]> {
    return request<{ values: string[] }>(
      this.base, `/api/properties/${encodeURIComponent(property)}/values`,
    ).then((body) => body.values)
  }

  translateExpr(expr: string): Promise<TranslationResponse> {
    return post(this.base, '/api/translate', { expr })
  }

  translateConceptText(conceptText: string): Promise<TranslationResponse> {
    return post(this.base, '/api/translate', { conceptText })
  }

  translateConcept(concept: string): Promise<TranslationResponse> {
    return post(this.base, '/api/translate', { concept })
  }

  executeExpr(expr: string, keysOnly = false): Promise<ExecuteResponse> {
    return post(this.base, '/api/execute', { expr, keysOnly })
  }

  executeConceptText(conceptText: string, keysOnly = false): Promise<ExecuteResponse> {
    return post(this.base, '/api/execute', { conceptText, keysOnly })
  }

  executeConcept(concept: string, keysOnly = false): Promise<ExecuteResponse> {
    return post(this.base, '/api/execute', { concept, keysOnly })
  }

  listConcepts(): Promise<ConceptSummary[]> {
    return request<{ concepts: ConceptSummary[] }>(this.base, '/api/concepts')
      .then((body) => body.concepts)
  }

  showConcept(name: string): Promise<ConceptDetail> {
    return request(this.base, `/api/concepts/${encodeURIComponent(name)}`)
  }

  saveConcept(name: string, assertions: string[], overwrite = false): Promise<ConceptSummary> {
    return post(this.base, '/api/concepts', { name, assertions, overwrite })
  }

  deleteConcept(name: string): Promise<{ deleted: string }> {
    return request(this.base, `/api/concepts/${encodeURIComponent(name)}`, {
      method: 'DELETE',
    })
  }
}
