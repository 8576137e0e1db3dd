from django.contrib import admin

from .models import ScenarioRecord


@admin.register(ScenarioRecord)
class ScenarioRecordAdmin(admin.ModelAdmin):
    list_display = (
        'sigma', 'seed', 'source', 'mean_dist_defender_goal', 'mean_dist_adversary_goal',
        'final_bimodality', 'J_a', 'J_d', 'failed', 'created_at'
    )
    list_filter = ('source', 'sigma', 'created_at')
    search_fields = ('output_dir', 'config_path', 'error')
    ordering = ('-created_at',)
    readonly_fields = ('created_at',)

    @admin.display(boolean=True, description='Failed')
    def failed(self, obj):
        return obj.failed
