// Browser bootstrap: render into #app, delegate clicks by data-action.

import { ApiClient } from './api.js'
import { WizardController } from './controller.js'
import { renderApp } from './ui.js'
import type { Combinator, Operator } from './serialize.js'

const root = document.getElementById('app')
if (root === null) {
  throw new Error('missing #app mount point')
}

const controller = new WizardController(new ApiClient(''), () => {
  root.innerHTML = renderApp(controller.state, controller.data)
})

function currentCombinator(): Combinator {
  const select = document.getElementById('combinator') as HTMLSelectElement | null
  return select !== null && select.value === 'union' ? 'union' : 'intersection'
}

function addFrom(arg: string, operator: Operator): void {
  const [property, operand] = arg.split('|', 2)
  controller.addCondition(operator, property, operand, currentCombinator())
}

root.addEventListener('click', (event) => {
  const target = (event.target as HTMLElement).closest('button[data-action]')
  if (target === null) return
  const action = target.getAttribute('data-action') ?? ''
  const arg = target.getAttribute('data-arg') ?? ''
  const nameField = document.getElementById('concept-name') as HTMLInputElement | null
  if (nameField !== null) controller.rename(nameField.value)

  switch (action) {
    case 'enter-class': void controller.enter(arg); break
    case 'pick-class': void controller.pick(arg); break
    case 'pop-class': void controller.up(); break
    case 'pick-property': void controller.pickProperty(arg); break
    case 'add-some': addFrom(arg, 'some'); break
    case 'add-only': addFrom(arg, 'only'); break
    case 'add-has': addFrom(arg, 'has'); break
    case 'add-has-not': addFrom(arg, 'has-not'); break
    case 'undo-atom': controller.undoAtom(); break
    case 'finish-assertion': controller.finishAssertion(); break
    case 'drop-assertion': controller.dropAssertion(Number(arg)); break
    case 'preview': void controller.preview(); break
    case 'run': void controller.previewAndRun(); break
    case 'save-concept': void controller.saveConcept(); break
    case 'run-concept': void controller.runConcept(arg); break
    case 'delete-concept': void controller.deleteConcept(arg); break
    case 'expert-translate': {
      const box = document.getElementById('expert-text') as HTMLTextAreaElement | null
      if (box !== null) void controller.expertTranslate(box.value)
      break
    }
  }
})

void controller.start()
