from obfuscation_backend.commands import PipelineCommand

from key_store.storage import describe_key, load_key


class Command(PipelineCommand):
    help = 'Print the array layout and metadata of a .dobk key file as JSON.'

    def add_arguments(self, parser):
        parser.add_argument('key', help='Key file (.dobk)')

    def run(self, **options):
        self.emit_json(describe_key(load_key(options['key'])))
