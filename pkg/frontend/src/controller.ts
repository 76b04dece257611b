// Orchestration: owns the state, fetches guidance lists, dispatches actions.
// Responses are tagged with a request token so a stale reply never clobbers
// a newer one.

import { ApiClient, ServiceError } from './api.js'
import type { GuidanceData } from './ui.js'
import {
  WizardState,
  addAtom,
  completeAssertion,
  enterClass,
  initialState,
  popClass,
  removeAssertion,
  removeLastAtom,
  selectedClass,
  serializeState,
  setConceptName,
} from './state.js'
import type { Atom, Combinator, Operator } from './serialize.js'

export class WizardController {
  state: WizardState = initialState()
  data: GuidanceData = {
    classes: [],
    properties: [],
    values: [],
    activeProperty: null,
    savedConcepts: [],
    banner: null,
    fieldError: null,
  }

  private token = 0

  constructor(readonly api: ApiClient, readonly onChange: () => void = () => {}) {}

  private fresh(): number {
    this.token += 1
    return this.token
  }

  private stale(token: number): boolean {
    return token !== this.token
  }

  private async guard<T>(work: () => Promise<T>): Promise<T | null> {
    try {
      this.data.banner = null
      this.data.fieldError = null
      return await work()
    } catch (error) {
      if (error instanceof ServiceError) {
        this.data.fieldError = `${error.detail.code}: ${error.detail.message}`
        if (error.detail.suggestions?.length) {
          this.data.fieldError += ` (try: ${error.detail.suggestions.join(', ')})`
        }
      } else {
        this.data.banner = `service unreachable: ${String(error)}`
      }
      this.onChange()
      return null
    }
  }

  async start(): Promise<void> {
    await this.guard(async () => {
      this.data.classes = await this.api.classes()
      this.data.savedConcepts = (await this.api.listConcepts()).map((c) => c.name)
      this.onChange()
    })
  }

  async refreshClassLevel(): Promise<void> {
    const token = this.fresh()
    await this.guard(async () => {
      const parent = selectedClass(this.state) ?? undefined
      const classes = await this.api.classes(parent)
      if (this.stale(token)) return
      this.data.classes = classes
      this.onChange()
    })
  }

  async enter(name: string): Promise<void> {
    this.state = enterClass(this.state, name)
    await this.refreshClassLevel()
    await this.pick(name)
  }

  async up(): Promise<void> {
    this.state = popClass(this.state)
    this.data.properties = []
    this.data.values = []
    this.data.activeProperty = null
    await this.refreshClassLevel()
  }

  /** Select a class as the subject of the next condition. */
  async pick(name: string): Promise<void> {
    if (selectedClass(this.state) !== name) {
      this.state = enterClass(this.state, name)
    }
    const token = this.fresh()
    await this.guard(async () => {
      const properties = await this.api.classProperties(name)
      if (this.stale(token)) return
      this.data.properties = properties
      this.data.values = []
      this.data.activeProperty = null
      this.onChange()
    })
  }

  async pickProperty(name: string): Promise<void> {
    const token = this.fresh()
    await this.guard(async () => {
      const values = await this.api.propertyValues(name)
      if (this.stale(token)) return
      this.data.activeProperty = name
      this.data.values = values
      this.onChange()
    })
  }

  addCondition(operator: Operator, property: string, operand: string,
               combinator: Combinator = 'intersection'): void {
    const atom: Atom = { property, operator, operand }
    if (operator === 'only') {
      // an all-values condition stands alone: it cannot compose with other
      // conditions inside one criterion, so it becomes its own assertion
      if (this.state.draft.atoms.length > 0) {
        this.state = completeAssertion(this.state)
      }
      this.state = completeAssertion(addAtom(this.state, atom, combinator))
    } else {
      this.state = addAtom(this.state, atom, combinator)
    }
    this.onChange()
  }

  undoAtom(): void {
    this.state = removeLastAtom(this.state)
    this.onChange()
  }

  finishAssertion(): void {
    if (this.state.draft.atoms.length === 0) return
    this.state = completeAssertion(this.state)
    this.onChange()
  }

  dropAssertion(index: number): void {
    this.state = removeAssertion(this.state, index)
    this.onChange()
  }

  rename(name: string): void {
    this.state = setConceptName(this.state, name)
  }

  async preview(): Promise<void> {
    const token = this.fresh()
    await this.guard(async () => {
      const payload = serializeState(this.state)
      const translation = payload.kind === 'expr'
        ? await this.api.translateExpr(payload.text)
        : await this.api.translateConceptText(payload.text)
      if (this.stale(token)) return
      this.state = { ...this.state, lastTranslation: translation }
      this.onChange()
    })
  }

  async previewAndRun(): Promise<void> {
    const token = this.fresh()
    await this.guard(async () => {
      const payload = serializeState(this.state)
      const translation = payload.kind === 'expr'
        ? await this.api.translateExpr(payload.text)
        : await this.api.translateConceptText(payload.text)
      const result = payload.kind === 'expr'
        ? await this.api.executeExpr(payload.text)
        : await this.api.executeConceptText(payload.text)
      if (this.stale(token)) return
      this.state = { ...this.state, lastTranslation: translation, lastResult: result }
      this.onChange()
    })
  }

  async runConcept(name: string): Promise<void> {
    const token = this.fresh()
    await this.guard(async () => {
      const translation = await this.api.translateConcept(name)
      const result = await this.api.executeConcept(name)
      if (this.stale(token)) return
      this.state = { ...this.state, lastTranslation: translation, lastResult: result }
      this.onChange()
    })
  }

  async saveConcept(): Promise<void> {
    await this.guard(async () => {
      const assertions = this.state.assertions.slice()
      if (this.state.draft.atoms.length > 0) {
        this.finishAssertion()
        assertions.push(this.state.assertions[this.state.assertions.length - 1])
      }
      await this.api.saveConcept(this.state.conceptName, assertions, true)
      this.data.savedConcepts = (await this.api.listConcepts()).map((c) => c.name)
      this.onChange()
    })
  }

  async deleteConcept(name: string): Promise<void> {
    await this.guard(async () => {
      await this.api.deleteConcept(name)
      this.data.savedConcepts = (await this.api.listConcepts()).map((c) => c.name)
      this.onChange()
    })
  }

  async expertTranslate(text: string): Promise<void> {
    const token = this.fresh()
    await this.guard(async () => {
      const trimmed = text.trim()
      const translation = trimmed.toLowerCase().startsWith('concept')
        ? await this.api.translateConceptText(trimmed)
        : await this.api.translateExpr(trimmed)
      if (this.stale(token)) return
      this.state = { ...this.state, lastTranslation: translation }
      this.onChange()
    })
  }
}
