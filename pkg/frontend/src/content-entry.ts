import { AnswerController, chromeRelay } from "./content";

const controller = new AnswerController({ root: document, relay: chromeRelay });
controller.scan();
controller.observe();
